//! Regime analysis: when do no-regret (Nash) outcomes exist, and which
//! routing policies realize them.
//!
//! Two exact thresholds split the budget axis. Below the zero-block
//! threshold `g = max_{E'} (C(E') - r)/|E'|` the router can leave `g` units
//! of headroom on every used edge and nothing can be blocked. Above
//! `C(E) - h`, with `h = max_{E'} (r - C(E \ E'))/|E'|`, every feasible
//! outcome already hits the universal lower bound `r + r^a - C(E)`, so the
//! leveled route is optimal and regret-free. Strictly between the two, any
//! best-response attack leaves the router wanting to deviate, so no Nash
//! outcome exists. Both maxima are attained by prefixes of the capacity-
//! sorted edge list, which makes them computable in `O(|E| log |E|)`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::attacker::best_response;
use crate::error::{Error, Result};
use crate::model::{blocked, is_feasible_profile, FlowProfile, GameInstance, ParallelNetwork};
use crate::rational::{pos_part, Rational};

/// A prefix-maximum threshold together with the largest maximizing set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub value: Rational,
    /// Largest set of edge indices attaining the maximum; always a prefix of
    /// the edges sorted by descending capacity.
    pub argmax: BTreeSet<usize>,
}

fn prefix_maximum(network: &ParallelNetwork, base: &Rational) -> Threshold {
    let n = network.edge_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| network.capacity(b).cmp(network.capacity(a)).then(a.cmp(&b)));
    let mut best: Option<(Rational, usize)> = None;
    let mut prefix_sum = Rational::zero();
    for (k, &edge) in order.iter().enumerate() {
        prefix_sum += network.capacity(edge);
        let value = (&prefix_sum - base) / Rational::from_integer(((k + 1) as i64).into());
        // Keep the largest maximizing prefix.
        if best.as_ref().is_none_or(|(v, _)| &value >= v) {
            best = Some((value, k + 1));
        }
    }
    let (value, size) = best.expect("networks are non-empty");
    Threshold {
        value,
        argmax: order[..size].iter().copied().collect(),
    }
}

fn check_demand(network: &ParallelNetwork, demand: &Rational) -> Result<()> {
    if demand.is_negative() || demand > &network.total_capacity() {
        return Err(Error::domain(format!(
            "demand {demand} outside [0, {}]",
            network.total_capacity()
        )));
    }
    Ok(())
}

/// The largest attack budget that some route neutralizes completely:
/// `g = max over nonempty E' of (C(E') - r) / |E'|`.
pub fn zero_block_threshold(network: &ParallelNetwork, demand: &Rational) -> Result<Threshold> {
    check_demand(network, demand)?;
    Ok(prefix_maximum(network, demand))
}

/// The level `h = max over nonempty E' of (r - C(E \ E')) / |E'|` of the
/// leveled route; full blocking is unavoidable once the budget reaches
/// `C(E) - h`. Uses the identity `r - C(E \ E') = C(E') - (C(E) - r)` to run
/// the same prefix scan as [`zero_block_threshold`].
pub fn full_block_level(network: &ParallelNetwork, demand: &Rational) -> Result<Threshold> {
    check_demand(network, demand)?;
    let base = network.total_capacity() - demand;
    Ok(prefix_maximum(network, &base))
}

/// The route `f_e = max(c_e - g, 0)`: fill capacity above a uniform headroom
/// of `g` on every edge. Feasible for any `0 <= r <= C(E)`, and suffers zero
/// blocking whenever the budget is at most `g`.
pub fn route_for_low_budget(network: &ParallelNetwork, demand: &Rational) -> Result<FlowProfile> {
    let g = zero_block_threshold(network, demand)?.value;
    let flows = network
        .capacities()
        .iter()
        .map(|c| pos_part(&(c - &g)))
        .collect();
    let route = FlowProfile::new(flows)?;
    debug_assert_eq!(&route.total(), demand);
    Ok(route)
}

/// The leveled route `f_e = min(c_e, h)`. Feasible, and against any feasible
/// attack with budget at least `C(E) - h` it blocks exactly the lower bound
/// `r + r^a - C(E)`.
pub fn route_for_high_budget(network: &ParallelNetwork, demand: &Rational) -> Result<FlowProfile> {
    let h = full_block_level(network, demand)?.value;
    let flows = network
        .capacities()
        .iter()
        .map(|c| if c < &h { c.clone() } else { h.clone() })
        .collect();
    let route = FlowProfile::new(flows)?;
    debug_assert_eq!(&route.total(), demand);
    Ok(route)
}

/// Which of the two no-regret regimes an instance falls into, if any.
///
/// The `NoNe` characterization requires `0 < r < C(E)`: at the two extreme
/// demands the feasible route set is a single point, so the router trivially
/// has no deviation and every best-response pair is a no-regret outcome
/// regardless of the budget. Classification reports the threshold comparison
/// as-is; callers relying on nonexistence should treat those demands apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `r^a <= g`: Nash outcomes exist and nothing gets blocked.
    ZeroBlockNe,
    /// `r^a >= C(E) - h`: Nash outcomes exist and exactly
    /// `r + r^a - C(E)` gets blocked.
    FullBlockNe,
    /// Strictly between: no Nash outcome exists (for interior demands).
    NoNe,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ZeroBlockNe => "zero_block_ne",
            Regime::FullBlockNe => "full_block_ne",
            Regime::NoNe => "no_ne",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegimeReport {
    /// Threshold `g` below which zero blocking is guaranteed.
    pub zero_block_threshold: Rational,
    /// Level `h` of the leveled route.
    pub full_block_level: Rational,
    /// `C(E) - h`: budgets at or above this make full blocking unavoidable.
    pub full_block_threshold: Rational,
    /// Primary classification; `ZeroBlockNe` wins when both conditions hold.
    pub regime: Regime,
    pub zero_block_holds: bool,
    pub full_block_holds: bool,
}

pub fn classify_regime(instance: &GameInstance) -> Result<RegimeReport> {
    let g = zero_block_threshold(&instance.network, &instance.demand)?.value;
    let h = full_block_level(&instance.network, &instance.demand)?.value;
    let full_threshold = instance.network.total_capacity() - &h;
    let zero_block_holds = instance.budget <= g;
    let full_block_holds = instance.budget >= full_threshold;
    let regime = if zero_block_holds {
        Regime::ZeroBlockNe
    } else if full_block_holds {
        Regime::FullBlockNe
    } else {
        Regime::NoNe
    };
    Ok(RegimeReport {
        zero_block_threshold: g,
        full_block_level: h,
        full_block_threshold: full_threshold,
        regime,
        zero_block_holds,
        full_block_holds,
    })
}

/// True iff `(route, attack)` is a Nash outcome: the attack is a best
/// response to the route, and the route is a best response to the attack.
/// The router's best-response value against any fixed feasible attack is
/// `max(r + r^a - C(E), 0)`, since it can always fill residual capacities
/// first; so the second condition is a value check.
pub fn verify_nash(
    instance: &GameInstance,
    route: &FlowProfile,
    attack: &FlowProfile,
) -> Result<bool> {
    if !is_feasible_profile(&instance.network, &instance.demand, route)? {
        return Err(Error::domain("route is not feasible for the instance"));
    }
    if !is_feasible_profile(&instance.network, &instance.budget, attack)? {
        return Err(Error::domain("attack is not feasible for the instance"));
    }
    let achieved = blocked(&instance.network, route, attack)?.total;
    let optimal_attack = best_response(&instance.network, route, &instance.budget)?.value;
    if achieved != optimal_attack {
        return Ok(false);
    }
    let router_floor =
        pos_part(&(&instance.demand + &instance.budget - instance.network.total_capacity()));
    Ok(achieved == router_floor)
}

#[derive(Debug, Clone)]
pub struct RegimeCell {
    pub demand: Rational,
    pub budget: Rational,
    pub regime: Regime,
}

/// Classifies every grid point `(r, r^a)` with the given step, clipped to
/// the square `[0, min(r_max, C(E))]^2`. Row-major: demand varies slowest.
pub fn regime_map(
    network: &ParallelNetwork,
    r_max: &Rational,
    ra_max: &Rational,
    step: &Rational,
) -> Result<Vec<RegimeCell>> {
    if !step.is_positive() {
        return Err(Error::domain("grid step must be positive"));
    }
    let cap = network.total_capacity();
    let clip = |limit: &Rational| {
        if limit < &cap {
            limit.clone()
        } else {
            cap.clone()
        }
    };
    let (r_top, ra_top) = (clip(r_max), clip(ra_max));
    let mut cells = Vec::new();
    let mut demand = Rational::zero();
    while demand <= r_top {
        let g = zero_block_threshold(network, &demand)?.value;
        let full_threshold = &cap - full_block_level(network, &demand)?.value;
        let mut budget = Rational::zero();
        while budget <= ra_top {
            let regime = if budget <= g {
                Regime::ZeroBlockNe
            } else if budget >= full_threshold {
                Regime::FullBlockNe
            } else {
                Regime::NoNe
            };
            cells.push(RegimeCell {
                demand: demand.clone(),
                budget: budget.clone(),
                regime,
            });
            budget += step;
        }
        demand += step;
    }
    Ok(cells)
}
