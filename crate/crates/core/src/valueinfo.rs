//! What is knowing the attacker's exact budget worth to the router?
//!
//! When the budget is only known to lie in an interval, committing to one
//! route incurs risk: the extra traffic an optimal attack blocks compared to
//! the budget-specific optimal route. The maximization over budgets can be
//! restricted to the subset capacity sums inside the interval plus the two
//! endpoints, because the best-response value climbs with slope 1 or stays
//! flat, turning from climb to flat only at subset sums, while the optimal
//! value never climbs faster than slope 1. The value of information is the
//! minimum achievable risk; two-link networks admit a closed form.

use num_traits::{Signed, Zero};
use rand::SeedableRng;

use crate::attacker::{best_response, candidate_budgets};
use crate::equilibria::{route_for_high_budget, route_for_low_budget};
use crate::error::{Error, Result};
use crate::model::{is_feasible_profile, FlowProfile, ParallelNetwork};
use crate::numeric;
use crate::rational::{clamp_rat, from_f64_exact, max_rat, min_rat, pos_part, Rational};
use crate::stackelberg::{stackelberg_value, SolverOptions};

/// An interval of possible attack budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl BudgetInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo.is_negative() || lo > hi {
            return Err(Error::domain(format!(
                "invalid budget interval [{lo}, {hi}]"
            )));
        }
        Ok(BudgetInterval { lo, hi })
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// One evaluated budget inside a risk computation.
#[derive(Debug, Clone)]
pub struct RiskPoint {
    pub budget: Rational,
    /// Exact worst-case blocking of the committed route at this budget.
    pub best_response: Rational,
    /// Stackelberg value at this budget (upper estimate when numerical).
    pub stackelberg: Rational,
    /// Certificate gap of the Stackelberg value; zero on exact paths.
    pub stackelberg_gap: Rational,
    /// `best_response - stackelberg`.
    pub regret: Rational,
}

#[derive(Debug, Clone)]
pub struct RiskResult {
    /// Maximum regret over the evaluated budgets, clamped at zero. When
    /// every Stackelberg value is exact this is the exact risk.
    pub risk: Rational,
    /// Upper end of the uncertainty band: risk if every numerical
    /// Stackelberg value sat at its certified lower bound.
    pub risk_upper: Rational,
    /// Budget attaining the maximum regret (first among ties).
    pub argmax_budget: Rational,
    pub points: Vec<RiskPoint>,
}

fn evaluation_budgets(
    network: &ParallelNetwork,
    interval: &BudgetInterval,
) -> Result<Vec<Rational>> {
    let mut budgets: Vec<Rational> = vec![interval.lo.clone()];
    for sum in candidate_budgets(network)? {
        if interval.contains(&sum) && sum != interval.lo && sum != interval.hi {
            budgets.push(sum);
        }
    }
    if interval.hi != interval.lo {
        budgets.push(interval.hi.clone());
    }
    Ok(budgets)
}

/// The risk of committing to `route` when the budget is only known to lie
/// in `interval`: the worst extra blocking versus the budget-specific
/// optimum, maximized over the candidate budgets.
pub fn risk(
    network: &ParallelNetwork,
    demand: &Rational,
    route: &FlowProfile,
    interval: &BudgetInterval,
    options: &SolverOptions,
) -> Result<RiskResult> {
    if !is_feasible_profile(network, demand, route)? {
        return Err(Error::domain("route is not feasible for the demand"));
    }
    if interval.hi > network.total_capacity() {
        return Err(Error::domain(format!(
            "interval upper end {} exceeds total capacity {}",
            interval.hi,
            network.total_capacity()
        )));
    }
    let mut points = Vec::new();
    for budget in evaluation_budgets(network, interval)? {
        let b_star = best_response(network, route, &budget)?.value;
        let se = stackelberg_value(network, demand, &budget, options)?;
        let regret = &b_star - &se.value;
        points.push(RiskPoint {
            budget,
            best_response: b_star,
            stackelberg: se.value,
            stackelberg_gap: se.certificate.gap,
            regret,
        });
    }
    let mut best_idx = 0;
    for (i, p) in points.iter().enumerate() {
        if p.regret > points[best_idx].regret {
            best_idx = i;
        }
    }
    let risk = pos_part(&points[best_idx].regret);
    let risk_upper = points
        .iter()
        .map(|p| pos_part(&(&p.regret + &p.stackelberg_gap)))
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(RiskResult {
        risk,
        risk_upper,
        argmax_budget: points[best_idx].budget.clone(),
        points,
    })
}

fn two_link_sorted(network: &ParallelNetwork) -> Result<(usize, usize)> {
    if network.edge_count() != 2 {
        return Err(Error::Shape {
            expected: 2,
            got: network.edge_count(),
        });
    }
    Ok(if network.capacity(0) <= network.capacity(1) {
        (0, 1)
    } else {
        (1, 0)
    })
}

/// Pointwise regret on a two-link network for budgets inside `[c1, c2]`
/// (capacities sorted): `|f_1 - (r + r^a - c2)/2|`, the distance of the
/// small-edge flow from the attack-equalizing split. Matches
/// `best_response - stackelberg_value` exactly whenever the equalizing split
/// is feasible.
pub fn two_link_regret(
    network: &ParallelNetwork,
    demand: &Rational,
    route: &FlowProfile,
    budget: &Rational,
) -> Result<Rational> {
    let (lo, hi) = two_link_sorted(network)?;
    if !is_feasible_profile(network, demand, route)? {
        return Err(Error::domain("route is not feasible for the demand"));
    }
    if budget < network.capacity(lo) || budget > network.capacity(hi) {
        return Err(Error::domain(format!(
            "budget {budget} outside [{}, {}]",
            network.capacity(lo),
            network.capacity(hi)
        )));
    }
    let half = Rational::new(1.into(), 2.into());
    let equalizer = (demand + budget - network.capacity(hi)) * half;
    let diff = &route[lo] - equalizer;
    Ok(diff.abs())
}

#[derive(Debug, Clone)]
pub struct TwoLinkVoi {
    pub value: Rational,
    pub route: FlowProfile,
}

/// Closed-form value of information on a two-link network.
///
/// With capacities sorted `c1 <= c2`: if the interval misses `[c1, c2]`
/// entirely, one closed-form route is optimal across the whole interval and
/// the value is zero. Otherwise the value is a quarter of the overlap
/// length, achieved by splitting the difference between the equalizing
/// routes at the clipped endpoints. The formula assumes those equalizing
/// splits are feasible; for extreme demands it can overestimate.
pub fn two_link_value_of_information(
    network: &ParallelNetwork,
    demand: &Rational,
    interval: &BudgetInterval,
) -> Result<TwoLinkVoi> {
    let (lo, hi) = two_link_sorted(network)?;
    if demand.is_negative() || demand > &network.total_capacity() {
        return Err(Error::domain(format!("demand {demand} outside [0, C(E)]")));
    }
    if interval.hi > network.total_capacity() {
        return Err(Error::domain("interval exceeds total capacity"));
    }
    let (c_small, c_large) = (network.capacity(lo), network.capacity(hi));
    if &interval.hi < c_small || &interval.lo > c_large {
        let route = if &interval.hi < c_small {
            route_for_low_budget(network, demand)?
        } else {
            route_for_high_budget(network, demand)?
        };
        return Ok(TwoLinkVoi {
            value: Rational::zero(),
            route,
        });
    }
    let eff_lo = max_rat(c_small, &interval.lo).clone();
    let eff_hi = min_rat(c_large, &interval.hi).clone();
    let quarter = Rational::new(1.into(), 4.into());
    let value = (&eff_hi - &eff_lo) * &quarter;
    let two = Rational::from_integer(2.into());
    let raw = (demand * &two + &eff_lo + &eff_hi - c_large * &two) * quarter;
    let lo_bound = pos_part(&(demand - c_large));
    let hi_bound = min_rat(c_small, demand).clone();
    let f_small = clamp_rat(raw, &lo_bound, &hi_bound);
    let mut flows = vec![Rational::zero(); 2];
    flows[lo] = f_small.clone();
    flows[hi] = demand - &f_small;
    Ok(TwoLinkVoi {
        value,
        route: FlowProfile::new(flows)?,
    })
}

#[derive(Debug, Clone, Default)]
pub struct VoiOptions {
    pub solver: SolverOptions,
    /// Run the subgradient path even on two-link networks instead of
    /// delegating to the closed form.
    pub force_numerical: bool,
}

#[derive(Debug, Clone)]
pub struct VoiResult {
    /// Risk of the returned route, evaluated with the per-budget
    /// Stackelberg values (exact when those are exact).
    pub value: Rational,
    /// Sound upper bound on the returned route's risk.
    pub value_upper: Rational,
    /// Certified lower bound on the value of information itself.
    pub lower_bound: Rational,
    pub gap: Rational,
    pub route: FlowProfile,
    pub converged: bool,
    pub iterations: usize,
}

/// Minimizes the risk over feasible routes.
///
/// Two-link networks delegate to the closed form unless `force_numerical`
/// is set. The numerical path pins the Stackelberg value at every candidate
/// budget, then runs the same projected subgradient machinery as the
/// Stackelberg solver on the max-over-candidates objective, snapping and
/// certifying the final route exactly.
pub fn value_of_information(
    network: &ParallelNetwork,
    demand: &Rational,
    interval: &BudgetInterval,
    options: &VoiOptions,
) -> Result<VoiResult> {
    if interval.hi > network.total_capacity() {
        return Err(Error::domain("interval exceeds total capacity"));
    }
    if network.edge_count() == 2 && !options.force_numerical {
        let closed = two_link_value_of_information(network, demand, interval)?;
        return Ok(VoiResult {
            value: closed.value.clone(),
            value_upper: closed.value.clone(),
            lower_bound: closed.value.clone(),
            gap: Rational::zero(),
            route: closed.route,
            converged: true,
            iterations: 0,
        });
    }

    let budgets = evaluation_budgets(network, interval)?;
    let mut constants = Vec::with_capacity(budgets.len());
    for budget in &budgets {
        let se = stackelberg_value(network, demand, budget, &options.solver)?;
        constants.push((se.value, se.certificate.gap));
    }

    let caps = numeric::to_f64_vec(network.capacities());
    let demand_f = crate::rational::to_f64(demand);
    let budgets_f: Vec<f64> = budgets.iter().map(crate::rational::to_f64).collect();
    let constants_f: Vec<f64> = constants
        .iter()
        .map(|(v, _)| crate::rational::to_f64(v))
        .collect();

    let mut starts: Vec<Vec<f64>> = vec![
        numeric::to_f64_vec(route_for_low_budget(network, demand)?.flows()),
        numeric::to_f64_vec(route_for_high_budget(network, demand)?.flows()),
    ];
    {
        let total: f64 = caps.iter().sum();
        if total > 0.0 {
            starts.push(caps.iter().map(|c| demand_f * c / total).collect());
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.solver.seed);
    for _ in 0..3 {
        let random = FlowProfile::random_feasible(network, demand, &mut rng)?;
        starts.push(numeric::to_f64_vec(random.flows()));
    }

    let per_start = (options.solver.max_iterations / starts.len()).max(1);
    let mut eval = |x: &[f64]| {
        let mut best = (f64::NEG_INFINITY, Vec::new(), 0usize, 0.0);
        for (i, budget) in budgets_f.iter().enumerate() {
            let (value, attack) = numeric::best_response_f64(&caps, x, *budget);
            let piece = value - constants_f[i];
            if piece > best.0 {
                best = (piece, attack, i, constants_f[i]);
            }
        }
        best
    };
    let outcome = numeric::subgradient_minimize(
        &caps,
        demand_f,
        &starts,
        per_start,
        options.solver.tolerance,
        &mut eval,
    );

    // Snap the float route and evaluate its risk exactly against the pinned
    // Stackelberg values.
    let denominators = numeric::snap_denominators(
        network
            .capacities()
            .iter()
            .cloned()
            .chain(budgets.iter().cloned())
            .chain([demand.clone()]),
    );
    let mut best_route: Option<(FlowProfile, Rational, Rational)> = None;
    for denom in &denominators {
        let route =
            numeric::snap_profile_with_denominator(network, demand, &outcome.best_x, denom)?;
        let mut est: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for (budget, (se_value, se_gap)) in budgets.iter().zip(&constants) {
            let b_star = best_response(network, &route, budget)?.value;
            let regret = &b_star - se_value;
            let high = &regret + se_gap;
            if est.as_ref().is_none_or(|cur| &regret > cur) {
                est = Some(regret);
            }
            if upper.as_ref().is_none_or(|cur| &high > cur) {
                upper = Some(high);
            }
        }
        let est = pos_part(&est.unwrap_or_else(Rational::zero));
        let upper = pos_part(&upper.unwrap_or_else(Rational::zero));
        if best_route.as_ref().is_none_or(|(_, v, _)| &est < v) {
            best_route = Some((route, est, upper));
        }
    }
    let (route, value, value_upper) = best_route.expect("at least one snap denominator");

    // Certified lower bound on the value of information via the exact
    // water-filling mixture over witness attacks, seeded with every
    // structure that is near-active at the returned route.
    let mut pool = outcome.pool;
    let route_f = numeric::to_f64_vec(route.flows());
    for (i, budget) in budgets_f.iter().enumerate() {
        let slack = (crate::rational::to_f64(&value_upper).abs() * 1e-6).max(1e-9);
        for attack in numeric::near_best_attacks_f64(&caps, &route_f, *budget, slack) {
            pool.push(numeric::PoolPiece {
                tag: i,
                attack,
                offset: constants_f[i],
            });
        }
    }
    let (mu, _) = numeric::optimize_mixture_f64(&caps, demand_f, &pool, 200);
    let mut lower = Rational::zero();
    if !mu.is_empty() {
        let snap_denom = num_bigint::BigInt::from(1_000_000_000u64);
        let mut attacks = Vec::with_capacity(pool.len());
        for piece in &pool {
            attacks.push(numeric::snap_profile_with_denominator(
                network,
                &budgets[piece.tag],
                &piece.attack,
                &snap_denom,
            )?);
        }
        for max_denominator in numeric::MIXTURE_DENOMINATORS {
            let weights = numeric::snap_mixture(&mu, max_denominator);
            let pieces: Vec<(FlowProfile, Rational, Rational)> = pool
                .iter()
                .zip(&attacks)
                .zip(&weights)
                .filter(|(_, w)| !w.is_zero())
                .map(|((piece, attack), w)| {
                    (attack.clone(), w.clone(), constants[piece.tag].0.clone())
                })
                .collect();
            if pieces.is_empty() {
                continue;
            }
            let bound = numeric::min_weighted_blocked_exact(network, demand, &pieces);
            if bound > lower {
                lower = bound;
            }
        }
    }

    let gap = pos_part(&(&value_upper - &lower));
    let converged = gap <= from_f64_exact(options.solver.tolerance);
    Ok(VoiResult {
        value,
        value_upper,
        lower_bound: lower,
        gap,
        route,
        converged,
        iterations: outcome.iterations,
    })
}
