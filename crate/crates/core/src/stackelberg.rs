//! Stackelberg routing: minimize the worst-case blocked traffic when the
//! route is revealed before the attack is chosen.
//!
//! In the two extreme budget regimes the optimal routes have closed forms
//! (the headroom route and the leveled route). Two-link networks admit exact
//! closed forms everywhere. For intermediate budgets on general parallel
//! networks the inner problem is already NP-hard, so the outer minimization
//! runs as a projected subgradient descent in float space with an exact
//! upper/lower certificate attached to the returned route.

use num_traits::{Signed, Zero};
use rand::SeedableRng;

use crate::attacker::{best_response, candidate_budgets, AttackStructure, BestResponseResult};
use crate::curve::PiecewiseLinearCurve;
use crate::equilibria::{
    classify_regime, route_for_high_budget, route_for_low_budget, zero_block_threshold, Regime,
};
use crate::error::{Error, Result};
use crate::model::{blocked, FlowProfile, GameInstance, ParallelNetwork};
use crate::numeric;
use crate::rational::{clamp_rat, from_f64_exact, pos_part, Rational};

/// Exact bracket on a minimax value: `lower <= optimum <= upper`.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub upper: Rational,
    pub lower: Rational,
    pub gap: Rational,
}

impl Certificate {
    fn exact(value: &Rational) -> Self {
        Certificate {
            upper: value.clone(),
            lower: value.clone(),
            gap: Rational::zero(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StackelbergResult {
    pub route: FlowProfile,
    /// Worst-case blocked traffic of `route`, evaluated exactly.
    pub value: Rational,
    pub certificate: Certificate,
    /// False when the iteration budget ran out before the certificate gap
    /// closed below the tolerance; the result is still the best found.
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-6,
            max_iterations: 5000,
            seed: 0,
        }
    }
}

fn require_two_links(network: &ParallelNetwork) -> Result<()> {
    if network.edge_count() != 2 {
        return Err(Error::Shape {
            expected: 2,
            got: network.edge_count(),
        });
    }
    Ok(())
}

/// The two canonical attacks on a two-link network: pile the budget onto one
/// edge and spill the remainder onto the other.
pub fn two_link_attacks(
    network: &ParallelNetwork,
    budget: &Rational,
) -> Result<(FlowProfile, FlowProfile)> {
    require_two_links(network)?;
    if budget.is_negative() || budget > &network.total_capacity() {
        return Err(Error::domain(format!(
            "attack budget {budget} outside [0, {}]",
            network.total_capacity()
        )));
    }
    let (c0, c1) = (network.capacity(0), network.capacity(1));
    let first = FlowProfile::new(vec![
        if budget < c0 {
            budget.clone()
        } else {
            c0.clone()
        },
        pos_part(&(budget - c0)),
    ])?;
    let second = FlowProfile::new(vec![
        pos_part(&(budget - c1)),
        if budget < c1 {
            budget.clone()
        } else {
            c1.clone()
        },
    ])?;
    Ok((first, second))
}

/// Best response on a two-link network by evaluating only the two canonical
/// attacks; agrees with the general solver in value.
pub fn two_link_best_response(
    network: &ParallelNetwork,
    route: &FlowProfile,
    budget: &Rational,
) -> Result<BestResponseResult> {
    require_two_links(network)?;
    let (first, second) = two_link_attacks(network, budget)?;
    let b_first = blocked(network, route, &first)?.total;
    let b_second = blocked(network, route, &second)?.total;
    let (value, attack) = if b_first >= b_second {
        (b_first, first)
    } else {
        (b_second, second)
    };
    let structure = structure_from_attack(network, route, &attack)?;
    Ok(BestResponseResult {
        value,
        attack,
        structure,
    })
}

/// Derives the canonical decomposition of an explicit attack profile.
fn structure_from_attack(
    network: &ParallelNetwork,
    route: &FlowProfile,
    attack: &FlowProfile,
) -> Result<AttackStructure> {
    let mut structure = AttackStructure {
        saturated: Default::default(),
        partial: None,
        dump: Vec::new(),
    };
    for e in 0..network.edge_count() {
        let amount = &attack[e];
        if amount.is_zero() {
            continue;
        }
        if amount == network.capacity(e) {
            structure.saturated.insert(e);
        } else if (&route[e] + amount - network.capacity(e)).is_positive() {
            if structure.partial.is_some() {
                return Err(Error::Internal(
                    "attack blocks partially on more than one edge".into(),
                ));
            }
            structure.partial = Some((e, amount.clone()));
        } else {
            structure.dump.push((e, amount.clone()));
        }
    }
    Ok(structure)
}

/// Exact Stackelberg solution on a two-link network.
///
/// Writing `c1 <= c2` for the sorted capacities: below the zero-block
/// threshold the headroom route blocks nothing; for budgets up to `c1` it
/// loses exactly `r^a - g`; inside `[c1, c2]` the optimum equalizes the two
/// canonical attacks at `f_1 = (r + r^a - c2)/2`; between `c2` and the
/// full-block threshold the leveled route loses exactly `h`; beyond that
/// every route loses `r + r^a - C(E)`.
pub fn two_link_stackelberg(
    network: &ParallelNetwork,
    demand: &Rational,
    budget: &Rational,
) -> Result<StackelbergResult> {
    require_two_links(network)?;
    let instance = GameInstance::new(network.clone(), demand.clone(), budget.clone())?;
    let report = classify_regime(&instance)?;
    let (lo, hi) = if network.capacity(0) <= network.capacity(1) {
        (0usize, 1usize)
    } else {
        (1usize, 0usize)
    };
    let (c_small, c_large) = (network.capacity(lo), network.capacity(hi));

    let (route, expected) = match report.regime {
        Regime::ZeroBlockNe => (route_for_low_budget(network, demand)?, Rational::zero()),
        Regime::FullBlockNe => (
            route_for_high_budget(network, demand)?,
            demand + budget - network.total_capacity(),
        ),
        Regime::NoNe => {
            if budget < c_small {
                let value = budget - &report.zero_block_threshold;
                (route_for_low_budget(network, demand)?, value)
            } else if budget <= c_large {
                let half = Rational::new(1.into(), 2.into());
                let raw = (demand + budget - c_large) * half;
                let lo_bound = pos_part(&(demand - c_large));
                let hi_bound = if c_small < demand {
                    c_small.clone()
                } else {
                    demand.clone()
                };
                let f_small = clamp_rat(raw, &lo_bound, &hi_bound);
                let mut flows = vec![Rational::zero(); 2];
                flows[lo] = f_small.clone();
                flows[hi] = demand - &f_small;
                let route = FlowProfile::new(flows)?;
                let value = two_link_best_response(network, &route, budget)?.value;
                (route, value)
            } else {
                (
                    route_for_high_budget(network, demand)?,
                    report.full_block_level.clone(),
                )
            }
        }
    };

    let achieved = best_response(network, &route, budget)?.value;
    if achieved != expected {
        return Err(Error::Internal(format!(
            "two-link closed form predicts {expected} but the route suffers {achieved}"
        )));
    }
    Ok(StackelbergResult {
        route,
        value: achieved,
        certificate: Certificate::exact(&expected),
        converged: true,
        iterations: 0,
    })
}

/// Numerically minimizes the exact best-response value over feasible routes.
///
/// Regime instances short-circuit to the exact closed forms. Otherwise runs
/// projected subgradient descent restarted from the headroom route, the
/// leveled route, a proportional fill and three random feasible points, then
/// snaps the best iterate to exact rationals and certifies it: the upper
/// bound is the exact best response at the returned route, the lower bound
/// is the best exact water-filling mixture bound over collected witness
/// attacks (never below `max(r + r^a - C(E), 0)`).
pub fn solve_stackelberg(
    instance: &GameInstance,
    options: &SolverOptions,
) -> Result<StackelbergResult> {
    if options.tolerance <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let network = &instance.network;
    let report = classify_regime(instance)?;
    match report.regime {
        Regime::ZeroBlockNe => {
            let route = route_for_low_budget(network, &instance.demand)?;
            let value = Rational::zero();
            return Ok(StackelbergResult {
                route,
                certificate: Certificate::exact(&value),
                value,
                converged: true,
                iterations: 0,
            });
        }
        Regime::FullBlockNe => {
            let route = route_for_high_budget(network, &instance.demand)?;
            let value = &instance.demand + &instance.budget - network.total_capacity();
            return Ok(StackelbergResult {
                route,
                certificate: Certificate::exact(&value),
                value,
                converged: true,
                iterations: 0,
            });
        }
        Regime::NoNe => {}
    }

    let caps = numeric::to_f64_vec(network.capacities());
    let demand_f = crate::rational::to_f64(&instance.demand);
    let budget_f = crate::rational::to_f64(&instance.budget);

    let mut starts: Vec<Vec<f64>> = vec![
        numeric::to_f64_vec(route_for_low_budget(network, &instance.demand)?.flows()),
        numeric::to_f64_vec(route_for_high_budget(network, &instance.demand)?.flows()),
        proportional_fill(&caps, demand_f),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..3 {
        let random = FlowProfile::random_feasible(network, &instance.demand, &mut rng)?;
        starts.push(numeric::to_f64_vec(random.flows()));
    }

    let per_start = (options.max_iterations / starts.len()).max(1);
    let mut eval = |x: &[f64]| {
        let (value, attack) = numeric::best_response_f64(&caps, x, budget_f);
        (value, attack, 0usize, 0.0)
    };
    let outcome = numeric::subgradient_minimize(
        &caps,
        demand_f,
        &starts,
        per_start,
        options.tolerance,
        &mut eval,
    );

    let (route, upper) = snap_and_evaluate(network, instance, &outcome.best_x)?;
    // Several attack structures usually tie at the optimum, and a tight
    // dual mixture is supported on exactly those; certify both over the
    // tying structures alone and over the whole witness pool.
    let route_f = numeric::to_f64_vec(route.flows());
    let slack = (crate::rational::to_f64(&upper) * 1e-6).max(1e-9);
    let active: Vec<numeric::PoolPiece> =
        numeric::near_best_attacks_f64(&caps, &route_f, budget_f, slack)
            .into_iter()
            .map(|attack| numeric::PoolPiece {
                tag: 0,
                attack,
                offset: 0.0,
            })
            .collect();
    let mut pool = outcome.pool;
    pool.extend(active.iter().map(|p| numeric::PoolPiece {
        tag: p.tag,
        attack: p.attack.clone(),
        offset: p.offset,
    }));
    let mut lower = pos_part(&(&instance.demand + &instance.budget - network.total_capacity()));
    for candidate_pool in [&active, &pool] {
        if candidate_pool.is_empty() {
            continue;
        }
        let (mu, _) = numeric::optimize_mixture_f64(&caps, demand_f, candidate_pool, 200);
        let bound = certify_lower_bound(instance, candidate_pool, &mu)?;
        if bound > lower {
            lower = bound;
        }
    }
    debug_assert!(lower <= upper);
    let gap = &upper - &lower;
    let converged = gap <= from_f64_exact(options.tolerance);
    Ok(StackelbergResult {
        route,
        value: upper.clone(),
        certificate: Certificate { upper, lower, gap },
        converged,
        iterations: outcome.iterations,
    })
}

fn proportional_fill(caps: &[f64], demand: f64) -> Vec<f64> {
    let total: f64 = caps.iter().sum();
    if total <= 0.0 {
        return vec![0.0; caps.len()];
    }
    caps.iter().map(|c| demand * c / total).collect()
}

/// Snaps the float route onto a few candidate denominators and keeps the
/// one whose exact best response is smallest.
fn snap_and_evaluate(
    network: &ParallelNetwork,
    instance: &GameInstance,
    x: &[f64],
) -> Result<(FlowProfile, Rational)> {
    let denominators = numeric::snap_denominators(
        network
            .capacities()
            .iter()
            .cloned()
            .chain([instance.demand.clone(), instance.budget.clone()]),
    );
    let mut best: Option<(FlowProfile, Rational)> = None;
    for denom in &denominators {
        let route = numeric::snap_profile_with_denominator(network, &instance.demand, x, denom)?;
        let value = best_response(network, &route, &instance.budget)?.value;
        if best.as_ref().is_none_or(|(_, v)| &value < v) {
            best = Some((route, value));
        }
    }
    Ok(best.expect("at least one snap denominator"))
}

/// Exact lower bound from an attack pool and mixture weights: snap the
/// float attacks to feasible profiles, snap the weights, and evaluate the
/// water-filling relaxation in exact arithmetic.
fn certify_lower_bound(
    instance: &GameInstance,
    pool: &[numeric::PoolPiece],
    mu: &[f64],
) -> Result<Rational> {
    let network = &instance.network;
    let mut lower = pos_part(&(&instance.demand + &instance.budget - network.total_capacity()));

    let snap_denom = num_bigint::BigInt::from(1_000_000_000u64);
    if !mu.is_empty() {
        let mut attacks = Vec::with_capacity(pool.len());
        for piece in pool {
            attacks.push(numeric::snap_profile_with_denominator(
                network,
                &instance.budget,
                &piece.attack,
                &snap_denom,
            )?);
        }
        for max_denominator in numeric::MIXTURE_DENOMINATORS {
            let weights = numeric::snap_mixture(mu, max_denominator);
            let pieces: Vec<(FlowProfile, Rational, Rational)> = attacks
                .iter()
                .zip(&weights)
                .filter(|(_, w)| !w.is_zero())
                .map(|(attack, w)| (attack.clone(), w.clone(), Rational::zero()))
                .collect();
            if pieces.is_empty() {
                continue;
            }
            let bound = numeric::min_weighted_blocked_exact(network, &instance.demand, &pieces);
            if bound > lower {
                lower = bound;
            }
        }
    }

    // On two links the even mixture of the two canonical attacks is tight.
    if network.edge_count() == 2 {
        let (first, second) = two_link_attacks(network, &instance.budget)?;
        let half = Rational::new(1.into(), 2.into());
        let bound = numeric::min_weighted_blocked_exact(
            network,
            &instance.demand,
            &[
                (first, half.clone(), Rational::zero()),
                (second, half, Rational::zero()),
            ],
        );
        if bound > lower {
            lower = bound;
        }
    }
    Ok(lower)
}

/// Worst-case blocked traffic under an optimal attack for the best route,
/// picking whichever solver is exact for the instance: regime closed forms,
/// the two-link closed form, or the numerical solver.
pub fn stackelberg_value(
    network: &ParallelNetwork,
    demand: &Rational,
    budget: &Rational,
    options: &SolverOptions,
) -> Result<StackelbergResult> {
    let instance = GameInstance::new(network.clone(), demand.clone(), budget.clone())?;
    let report = classify_regime(&instance)?;
    if report.regime == Regime::NoNe && network.edge_count() == 2 {
        return two_link_stackelberg(network, demand, budget);
    }
    solve_stackelberg(&instance, options)
}

/// The Stackelberg value as a function of the attack budget on
/// `[0, budget_max]`, sampled at every subset capacity sum, the two regime
/// thresholds, and `samples` uniform points, joined linearly.
pub fn stackelberg_curve(
    network: &ParallelNetwork,
    demand: &Rational,
    budget_max: &Rational,
    samples: usize,
    options: &SolverOptions,
) -> Result<PiecewiseLinearCurve> {
    if samples < 2 {
        return Err(Error::domain("need at least 2 curve samples"));
    }
    if budget_max.is_negative() || budget_max > &network.total_capacity() {
        return Err(Error::domain(format!(
            "budget_max {budget_max} outside [0, {}]",
            network.total_capacity()
        )));
    }
    let mut xs: std::collections::BTreeSet<Rational> = std::collections::BTreeSet::new();
    xs.insert(Rational::zero());
    xs.insert(budget_max.clone());
    for sum in candidate_budgets(network)? {
        if &sum <= budget_max {
            xs.insert(sum);
        }
    }
    let g = zero_block_threshold(network, demand)?.value;
    if g.is_positive() && &g <= budget_max {
        xs.insert(g);
    }
    let full =
        &network.total_capacity() - crate::equilibria::full_block_level(network, demand)?.value;
    if full.is_positive() && &full <= budget_max {
        xs.insert(full);
    }
    if budget_max.is_positive() {
        for i in 1..samples {
            let x = budget_max * Rational::new((i as i64).into(), ((samples - 1) as i64).into());
            xs.insert(x);
        }
    }
    let mut points = Vec::with_capacity(xs.len());
    for x in xs {
        let value = stackelberg_value(network, demand, &x, options)?.value;
        points.push((x, value));
    }
    PiecewiseLinearCurve::from_points_simplified(points)
}
