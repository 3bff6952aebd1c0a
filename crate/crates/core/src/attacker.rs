//! Best-response attack solvers.
//!
//! Against a revealed route, an optimal flooding attack can always be put in
//! a canonical shape: a set of fully saturated edges plus at most one edge
//! that is attacked partially, with the leftover budget dumped where it
//! blocks nothing. Shifting attack mass between two partially blocked edges
//! never decreases the blocked total, so some optimum has this shape. The
//! exact solver enumerates saturated sets with branch-and-bound; the problem
//! is a knapsack in disguise, so no polynomial algorithm is expected.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::curve::PiecewiseLinearCurve;
use crate::error::{Error, Result};
use crate::model::{blocked, FlowProfile, ParallelNetwork};
use crate::rational::Rational;

/// Edge cap for the exact subset-enumeration solver.
pub const MAX_EXACT_EDGES: usize = 20;

/// Budget-unit cap for the lattice oracle and the pseudo-polynomial path.
pub const MAX_BUDGET_UNITS: u64 = 10_000_000;

/// Canonical decomposition of an attack profile: the saturated set carries
/// `f^a_e = c_e`, at most one further edge receives a partial amount, and the
/// rest of the budget is dumped without blocking anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackStructure {
    pub saturated: BTreeSet<usize>,
    pub partial: Option<(usize, Rational)>,
    pub dump: Vec<(usize, Rational)>,
}

impl AttackStructure {
    /// Reassembles the attack profile described by this structure.
    pub fn attack_profile(&self, network: &ParallelNetwork) -> FlowProfile {
        let mut flows = vec![Rational::zero(); network.edge_count()];
        for &e in &self.saturated {
            flows[e] = network.capacity(e).clone();
        }
        if let Some((e, amount)) = &self.partial {
            flows[*e] = amount.clone();
        }
        for (e, amount) in &self.dump {
            flows[*e] += amount;
        }
        FlowProfile::new(flows).expect("structure amounts are nonnegative")
    }
}

/// The value of an optimal attack together with a witnessing profile.
#[derive(Debug, Clone)]
pub struct BestResponseResult {
    pub value: Rational,
    pub attack: FlowProfile,
    pub structure: AttackStructure,
}

struct Candidate {
    value: Rational,
    mask: u32,
    partial: Option<(usize, Rational)>, // (edge, gain), gain > 0
}

/// True iff set `a` precedes set `b` in the canonical order: smaller
/// cardinality first, then lexicographically smaller as a sorted index list.
fn set_precedes(a: u32, b: u32) -> bool {
    let (ca, cb) = (a.count_ones(), b.count_ones());
    if ca != cb {
        return ca < cb;
    }
    if a == b {
        return false;
    }
    let low = (a ^ b).trailing_zeros();
    a & (1 << low) != 0
}

struct Search<'a> {
    caps: &'a [Rational],
    flows: &'a [Rational],
    budget: &'a Rational,
    suffix_flow: Vec<Rational>,
    best: Option<Candidate>,
}

impl Search<'_> {
    fn partial_gain(&self, edge: usize, residual: &Rational) -> Rational {
        let headroom = &self.caps[edge] - &self.flows[edge];
        let raw = residual - headroom;
        if raw.is_positive() {
            if raw >= self.flows[edge] {
                self.flows[edge].clone()
            } else {
                raw
            }
        } else {
            Rational::zero()
        }
    }

    fn evaluate_leaf(&mut self, mask: u32, cap_sum: &Rational, flow_sum: &Rational) {
        let residual = self.budget - cap_sum;
        debug_assert!(!residual.is_negative());
        let mut partial: Option<(usize, Rational)> = None;
        for e in 0..self.caps.len() {
            if mask & (1 << e) != 0 {
                continue;
            }
            let gain = self.partial_gain(e, &residual);
            if gain.is_positive() && partial.as_ref().is_none_or(|(_, g)| &gain > g) {
                partial = Some((e, gain));
            }
        }
        let value = flow_sum
            + partial
                .as_ref()
                .map_or(Rational::zero(), |(_, g)| g.clone());
        // Each saturated set is visited once with its smallest-index best
        // partial edge, so ties reduce to the set ordering.
        let replace = match &self.best {
            None => true,
            Some(best) => {
                value > best.value || (value == best.value && set_precedes(mask, best.mask))
            }
        };
        if replace {
            self.best = Some(Candidate {
                value,
                mask,
                partial,
            });
        }
    }

    fn dfs(
        &mut self,
        edge: usize,
        mask: u32,
        cap_sum: Rational,
        flow_sum: Rational,
        max_flow_excluded: Rational,
    ) {
        if let Some(best) = &self.best {
            // Everything still undecided saturated plus the best excluded
            // edge as partial is an upper bound on this subtree.
            let bound = &flow_sum + &self.suffix_flow[edge] + &max_flow_excluded;
            if bound < best.value {
                return;
            }
        }
        if edge == self.caps.len() {
            self.evaluate_leaf(mask, &cap_sum, &flow_sum);
            return;
        }
        let include_cap = &cap_sum + &self.caps[edge];
        if &include_cap <= self.budget {
            self.dfs(
                edge + 1,
                mask | (1 << edge),
                include_cap,
                &flow_sum + &self.flows[edge],
                max_flow_excluded.clone(),
            );
        }
        let excluded = if self.flows[edge] > max_flow_excluded {
            self.flows[edge].clone()
        } else {
            max_flow_excluded
        };
        self.dfs(edge + 1, mask, cap_sum, flow_sum, excluded);
    }
}

fn validate_route(network: &ParallelNetwork, route: &FlowProfile) -> Result<()> {
    network.check_shape(route)?;
    for e in 0..network.edge_count() {
        if &route[e] > network.capacity(e) {
            return Err(Error::domain(format!(
                "route exceeds capacity on edge {e}: {} > {}",
                route[e],
                network.capacity(e)
            )));
        }
    }
    Ok(())
}

fn validate_budget(network: &ParallelNetwork, budget: &Rational) -> Result<()> {
    if budget.is_negative() || budget > &network.total_capacity() {
        return Err(Error::domain(format!(
            "attack budget {budget} outside [0, {}]; no feasible attack exists",
            network.total_capacity()
        )));
    }
    Ok(())
}

/// Computes an exact best-response attack to `route` under `budget`.
///
/// Enumerates saturated sets `S` with `C(S) <= r^a`; for each, the residual
/// budget may be spent on one partial edge outside `S`. Ties are broken
/// deterministically: smaller saturated set, then lexicographically smaller,
/// then smaller partial edge index. Runs in `O(2^|E| |E|)` with pruning.
pub fn best_response(
    network: &ParallelNetwork,
    route: &FlowProfile,
    budget: &Rational,
) -> Result<BestResponseResult> {
    validate_route(network, route)?;
    validate_budget(network, budget)?;
    let n = network.edge_count();
    if n > MAX_EXACT_EDGES {
        return Err(Error::TooLarge {
            what: "edge count for the exact best-response solver",
            cap: MAX_EXACT_EDGES as u64,
            got: n as u64,
            hint: "use best_response_dp for integral instances or the lattice oracle",
        });
    }

    let caps = network.capacities();
    let flows = route.flows();
    let mut suffix_flow = vec![Rational::zero(); n + 1];
    for e in (0..n).rev() {
        suffix_flow[e] = &suffix_flow[e + 1] + &flows[e];
    }
    let mut search = Search {
        caps,
        flows,
        budget,
        suffix_flow,
        best: None,
    };
    search.dfs(0, 0, Rational::zero(), Rational::zero(), Rational::zero());
    let chosen = search
        .best
        .expect("the empty saturated set is always feasible");

    let (attack, structure) = assemble_attack(network, route, budget, &chosen)?;
    let report = blocked(network, route, &attack)?;
    if report.total != chosen.value {
        return Err(Error::Internal(format!(
            "assembled attack blocks {} but the enumeration found {}",
            report.total, chosen.value
        )));
    }
    Ok(BestResponseResult {
        value: chosen.value,
        attack,
        structure,
    })
}

/// Builds the canonical witness attack: saturate the chosen set, give the
/// partial edge as much of the residual as it can hold, and dump the rest
/// below the blocking thresholds in increasing edge order.
fn assemble_attack(
    network: &ParallelNetwork,
    route: &FlowProfile,
    budget: &Rational,
    chosen: &Candidate,
) -> Result<(FlowProfile, AttackStructure)> {
    let n = network.edge_count();
    let mut flows = vec![Rational::zero(); n];
    let mut saturated = BTreeSet::new();
    let mut remaining = budget.clone();
    for (e, flow) in flows.iter_mut().enumerate() {
        if chosen.mask & (1 << e) != 0 {
            *flow = network.capacity(e).clone();
            remaining -= network.capacity(e);
            saturated.insert(e);
        }
    }
    let partial = chosen.partial.as_ref().map(|(e, _)| {
        let amount = if &remaining < network.capacity(*e) {
            remaining.clone()
        } else {
            network.capacity(*e).clone()
        };
        flows[*e] = amount.clone();
        remaining -= &amount;
        (*e, amount)
    });
    let partial_edge = partial.as_ref().map(|(e, _)| *e);
    let mut dump = Vec::new();
    for e in 0..n {
        if remaining.is_zero() {
            break;
        }
        if saturated.contains(&e) || partial_edge == Some(e) {
            continue;
        }
        let slack = network.capacity(e) - &route[e];
        let amount = if remaining < slack {
            remaining.clone()
        } else {
            slack
        };
        if amount.is_positive() {
            flows[e] += &amount;
            remaining -= &amount;
            dump.push((e, amount));
        }
    }
    // At an optimum the leftover always fits below the thresholds: if it did
    // not, finishing the attack would block extra traffic and contradict
    // optimality of the enumerated value.
    if remaining.is_positive() {
        return Err(Error::Internal(format!(
            "could not place {remaining} units of attack budget without extra blocking"
        )));
    }
    Ok((
        FlowProfile::new(flows).expect("attack amounts are nonnegative"),
        AttackStructure {
            saturated,
            partial,
            dump,
        },
    ))
}

fn common_denominator<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    let mut lcm = BigInt::from(1);
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    lcm
}

fn to_u64(x: &BigInt, what: &'static str) -> Result<u64> {
    x.to_u64().ok_or(Error::TooLarge {
        what,
        cap: u64::MAX,
        got: u64::MAX,
        hint: "inputs have too large a common denominator",
    })
}

/// Exhaustive search over attacks on the per-edge lattice with step
/// `1/grid_denominator` that spend the budget exactly. Returns the best
/// lattice value, which is at most the true optimum and at least the true
/// optimum minus `|E|/grid_denominator`. Independent of [`best_response`]:
/// this is a plain dynamic program over budget units.
pub fn lattice_best_response(
    network: &ParallelNetwork,
    route: &FlowProfile,
    budget: &Rational,
    grid_denominator: u32,
) -> Result<Rational> {
    validate_route(network, route)?;
    validate_budget(network, budget)?;
    if grid_denominator == 0 {
        return Err(Error::domain("grid denominator must be positive"));
    }
    let d = BigInt::from(grid_denominator);
    let budget_units_big = budget * Rational::from_integer(d.clone());
    if !budget_units_big.is_integer() {
        return Err(Error::domain(format!(
            "budget {budget} is not a multiple of 1/{grid_denominator}; no lattice attack spends it exactly"
        )));
    }
    let budget_units = to_u64(&budget_units_big.to_integer(), "lattice budget units")? as usize;
    if budget_units as u64 > MAX_BUDGET_UNITS {
        return Err(Error::TooLarge {
            what: "lattice search budget units",
            cap: MAX_BUDGET_UNITS,
            got: budget_units as u64,
            hint: "reduce the grid denominator or the budget",
        });
    }

    let n = network.edge_count();
    // Per-edge cap in lattice units.
    let cap_units: Vec<usize> = (0..n)
        .map(|e| {
            let units = (network.capacity(e) * Rational::from_integer(d.clone())).floor();
            to_u64(&units.to_integer(), "lattice capacity units").map(|u| u as usize)
        })
        .collect::<Result<_>>()?;
    if cap_units.iter().sum::<usize>() < budget_units {
        return Err(Error::domain(format!(
            "the 1/{grid_denominator} lattice cannot hold {budget} units of attack"
        )));
    }
    let work: u64 = cap_units
        .iter()
        .map(|&c| c.min(budget_units) as u64 + 1)
        .sum::<u64>()
        .saturating_mul(budget_units as u64 + 1);
    if work > 500_000_000 {
        return Err(Error::TooLarge {
            what: "lattice search table work",
            cap: 500_000_000,
            got: work,
            hint: "reduce the grid denominator or the budget",
        });
    }

    // Scale so every blocked amount is an integer: L is a common denominator
    // of the grid, all capacities and all flows.
    let scale = common_denominator(
        network
            .capacities()
            .iter()
            .chain(route.flows().iter())
            .chain(std::iter::once(&Rational::from_integer(d.clone()))),
    )
    .lcm(&d);
    let per_unit: BigInt = &scale / &d; // scaled size of one lattice step
    let per_unit_i = per_unit
        .to_i128()
        .ok_or_else(|| Error::Internal("lattice scale overflow".into()))?;
    // base[e] = (f_e - c_e) * scale; blocked for k units = max(base + k*per_unit, 0).
    let base: Vec<i128> = (0..n)
        .map(|e| {
            let v = (&route[e] - network.capacity(e)) * Rational::from_integer(scale.clone());
            v.to_integer()
                .to_i128()
                .ok_or_else(|| Error::Internal("lattice scale overflow".into()))
        })
        .collect::<Result<_>>()?;

    // dp[b] = max scaled blocked traffic spending exactly b units.
    const UNREACHABLE: i128 = i128::MIN;
    let mut dp = vec![UNREACHABLE; budget_units + 1];
    dp[0] = 0;
    for e in 0..n {
        let cap = cap_units[e].min(budget_units);
        let mut next = vec![UNREACHABLE; budget_units + 1];
        for b in 0..=budget_units {
            if dp[b] == UNREACHABLE {
                continue;
            }
            for k in 0..=cap.min(budget_units - b) {
                let blocked_here = (base[e] + k as i128 * per_unit_i).max(0);
                let total = dp[b] + blocked_here;
                let slot = &mut next[b + k];
                if total > *slot {
                    *slot = total;
                }
            }
        }
        dp = next;
    }
    let best = dp[budget_units];
    if best == UNREACHABLE {
        return Err(Error::Internal(
            "lattice budget unexpectedly unreachable".into(),
        ));
    }
    Ok(Rational::new(BigInt::from(best), scale))
}

/// Exact best-response value via a pseudo-polynomial dynamic program, valid
/// whenever capacities and budget share a small common denominator. Mirrors
/// the 0-1 knapsack recursion over budget units, with a scan over the choice
/// of the single partially attacked edge. Cross-validates [`best_response`].
pub fn best_response_dp(
    network: &ParallelNetwork,
    route: &FlowProfile,
    budget: &Rational,
) -> Result<Rational> {
    validate_route(network, route)?;
    validate_budget(network, budget)?;
    let n = network.edge_count();
    let denom = common_denominator(network.capacities().iter().chain(std::iter::once(budget)));
    let unit = Rational::new(BigInt::from(1), denom.clone());
    let budget_units = to_u64(
        &(budget / &unit).to_integer(),
        "pseudo-polynomial budget units",
    )?;
    if budget_units > MAX_BUDGET_UNITS {
        return Err(Error::TooLarge {
            what: "pseudo-polynomial budget units",
            cap: MAX_BUDGET_UNITS,
            got: budget_units,
            hint: "capacities and budget need a smaller common denominator",
        });
    }
    let budget_units = budget_units as usize;
    let weight: Vec<usize> = (0..n)
        .map(|e| {
            to_u64(
                &(network.capacity(e) / &unit).to_integer(),
                "capacity units",
            )
            .map(|u| u as usize)
        })
        .collect::<Result<_>>()?;

    // dpx[w] = max flow sum of a saturated subset weighing exactly w units.
    let knapsack = |skip: Option<usize>| -> Vec<Option<Rational>> {
        let mut dpx: Vec<Option<Rational>> = vec![None; budget_units + 1];
        dpx[0] = Some(Rational::zero());
        for e in 0..n {
            if Some(e) == skip {
                continue;
            }
            let w = weight[e];
            if w > budget_units {
                continue;
            }
            for b in (w..=budget_units).rev() {
                if let Some(prev) = dpx[b - w].clone() {
                    let cand = prev + &route[e];
                    if dpx[b].as_ref().is_none_or(|cur| &cand > cur) {
                        dpx[b] = Some(cand);
                    }
                }
            }
        }
        dpx
    };

    let mut best = Rational::zero();
    let full = knapsack(None);
    for value in full.iter().flatten() {
        if value > &best {
            best = value.clone();
        }
    }
    for partial_edge in 0..n {
        if route[partial_edge].is_zero() {
            continue;
        }
        let table = knapsack(Some(partial_edge));
        let headroom = network.capacity(partial_edge) - &route[partial_edge];
        for (spent, value) in table.iter().enumerate() {
            let Some(value) = value else { continue };
            let residual = budget - Rational::from_integer(BigInt::from(spent)) * &unit;
            let raw = &residual - &headroom;
            let gain = if raw.is_positive() {
                if raw >= route[partial_edge] {
                    route[partial_edge].clone()
                } else {
                    raw
                }
            } else {
                continue;
            };
            let total = value + gain;
            if total > best {
                best = total;
            }
        }
    }
    Ok(best)
}

/// The best-response value `B*(f, .)` as a function of the attack budget on
/// `[0, budget_max]`, returned as an exact piecewise-linear curve. The curve
/// is continuous with every segment of slope 0 or 1, and every descending
/// kink sits at a subset capacity sum; violations are reported as errors.
pub fn best_response_curve(
    network: &ParallelNetwork,
    route: &FlowProfile,
    budget_max: &Rational,
) -> Result<PiecewiseLinearCurve> {
    validate_route(network, route)?;
    validate_budget(network, budget_max)?;
    let n = network.edge_count();
    if n > MAX_EXACT_EDGES {
        return Err(Error::TooLarge {
            what: "edge count for the best-response curve",
            cap: MAX_EXACT_EDGES as u64,
            got: n as u64,
            hint: "the construction enumerates all subsets",
        });
    }

    // Candidate budgets: subset sums C(S) and the per-edge thresholds
    // C(S) + (c_e - f_e) where a partial edge starts gaining.
    let mut candidates: BTreeSet<Rational> = BTreeSet::new();
    candidates.insert(Rational::zero());
    candidates.insert(budget_max.clone());
    let mut subset_sums = vec![Rational::zero()];
    for e in 0..n {
        let cap = network.capacity(e);
        let mut with_edge: Vec<Rational> = subset_sums.iter().map(|s| s + cap).collect();
        subset_sums.append(&mut with_edge);
    }
    for sum in &subset_sums {
        if sum <= budget_max {
            candidates.insert(sum.clone());
        }
        for e in 0..n {
            let shifted = sum + network.capacity(e) - &route[e];
            if shifted <= *budget_max && !shifted.is_negative() {
                candidates.insert(shifted);
            }
        }
    }

    let xs: Vec<Rational> = candidates.into_iter().collect();
    let mut points: Vec<(Rational, Rational)> = Vec::with_capacity(xs.len());
    for x in xs {
        let value = best_response(network, route, &x)?.value;
        points.push((x, value));
    }

    // A kink from slope 0 to slope 1 may fall strictly between candidates
    // (descending kinks never do). Recover it from the endpoint values: with
    // slopes restricted to {0, 1}, the only consistent shape is flat then
    // rising, so the kink is at b - (vb - va).
    let mut refined: Vec<(Rational, Rational)> = Vec::with_capacity(points.len() * 2);
    refined.push(points[0].clone());
    for window in points.windows(2) {
        let (a, va) = &window[0];
        let (b, vb) = &window[1];
        let rise = vb - va;
        let run = b - a;
        if rise.is_negative() || rise > run {
            return Err(Error::Internal(format!(
                "best-response curve is not nondecreasing 1-Lipschitz between {a} and {b}"
            )));
        }
        if rise.is_positive() && rise < run {
            refined.push((b - &rise, va.clone()));
        }
        refined.push((b.clone(), vb.clone()));
    }

    let curve = PiecewiseLinearCurve::from_points_simplified(refined)?;
    let (zero, one) = (Rational::zero(), Rational::from_integer(1.into()));
    for slope in curve.slopes() {
        if slope != zero && slope != one {
            return Err(Error::Internal(format!(
                "best-response curve has segment slope {slope}, expected 0 or 1"
            )));
        }
    }
    Ok(curve)
}

/// Sorted deduplicated subset capacity sums `{C(E') : E' subset of E}`; the
/// only budgets where a best-response curve can turn from rising to flat.
pub fn candidate_budgets(network: &ParallelNetwork) -> Result<Vec<Rational>> {
    let n = network.edge_count();
    if n > MAX_EXACT_EDGES {
        return Err(Error::TooLarge {
            what: "edge count for subset-sum enumeration",
            cap: MAX_EXACT_EDGES as u64,
            got: n as u64,
            hint: "candidate budgets enumerate all subsets",
        });
    }
    let mut sums: BTreeSet<Rational> = BTreeSet::new();
    sums.insert(Rational::zero());
    for e in 0..n {
        let cap = network.capacity(e);
        let with_edge: Vec<Rational> = sums.iter().map(|s| s + cap).collect();
        sums.extend(with_edge);
    }
    Ok(sums.into_iter().collect())
}
