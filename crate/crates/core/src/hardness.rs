//! Constructive reduction between 0-1 knapsack and the best-response attack
//! problem, in both directions, plus an independent knapsack dynamic program
//! used as a test oracle.
//!
//! The bridge: when every routed flow is strictly below both the smallest
//! positive residual `r^a - C(E')` and the smallest positive overshoot
//! `C(E') - r^a` over subsets, an optimal attack blocks each edge fully or
//! not at all, so picking the blocked set is exactly picking knapsack items.
//! (The overshoot margin matters: with flows above it, a subset that barely
//! exceeds the budget admits a profitable partial block of its last edge.)

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Deserialize;

use crate::attacker::{best_response, candidate_budgets};
use crate::error::{Error, Result};
use crate::model::{blocked, FlowProfile, ParallelNetwork};
use crate::rational::{parse_rational, Rational};

/// Capacity-unit cap for the knapsack dynamic program.
pub const MAX_DP_UNITS: u64 = 1_000_000;

/// A 0-1 knapsack instance with exact rational weights and values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    pub items: Vec<KnapsackItem>,
    pub capacity: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackItem {
    pub weight: Rational,
    pub value: Rational,
}

#[derive(Deserialize)]
struct KnapsackDoc {
    items: Vec<KnapsackItemDoc>,
    #[serde(rename = "W")]
    capacity: String,
}

#[derive(Deserialize)]
struct KnapsackItemDoc {
    w: String,
    v: String,
}

impl KnapsackInstance {
    pub fn new(items: Vec<KnapsackItem>, capacity: Rational) -> Result<Self> {
        for (i, item) in items.iter().enumerate() {
            if item.weight.is_negative() || item.value.is_negative() {
                return Err(Error::domain(format!(
                    "item {i} has negative weight or value"
                )));
            }
        }
        if capacity.is_negative() {
            return Err(Error::domain("knapsack capacity must be nonnegative"));
        }
        Ok(KnapsackInstance { items, capacity })
    }

    pub fn from_ints(items: &[(i64, i64)], capacity: i64) -> Self {
        KnapsackInstance::new(
            items
                .iter()
                .map(|&(w, v)| KnapsackItem {
                    weight: crate::rational::rat(w),
                    value: crate::rational::rat(v),
                })
                .collect(),
            crate::rational::rat(capacity),
        )
        .expect("integer instances are valid")
    }

    /// Reads an instance from its JSON document form:
    /// `{"items":[{"w":"2","v":"3"},...],"W":"5"}` with rationals given as
    /// decimal or `"p/q"` strings.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: KnapsackDoc = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("knapsack document: {e}")))?;
        let items = doc
            .items
            .iter()
            .map(|item| {
                Ok(KnapsackItem {
                    weight: parse_rational(&item.w)?,
                    value: parse_rational(&item.v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        KnapsackInstance::new(items, parse_rational(&doc.capacity)?)
    }
}

/// The smallest positive residual `r^a - C(E')` over subsets of edges:
/// routed flows must stay strictly below this for the knapsack reduction's
/// all-or-nothing behavior (together with [`min_overshoot`]).
pub fn all_or_nothing_bound(network: &ParallelNetwork, budget: &Rational) -> Result<Rational> {
    if !budget.is_positive() {
        return Err(Error::domain(
            "the all-or-nothing bound needs a positive attack budget",
        ));
    }
    let mut best: Option<Rational> = None;
    for sum in candidate_budgets(network)? {
        let residual = budget - &sum;
        if residual.is_positive() && best.as_ref().is_none_or(|b| &residual < b) {
            best = Some(residual);
        }
    }
    // The empty subset always qualifies when the budget is positive.
    Ok(best.expect("budget - C(empty) is positive"))
}

/// The smallest positive overshoot `C(E') - r^a` over subsets, or `None`
/// when no subset exceeds the budget. A partial block of the last edge of a
/// barely-overshooting subset gains up to `f_e` minus this margin, so flows
/// below it keep best responses all-or-nothing.
pub fn min_overshoot(network: &ParallelNetwork, budget: &Rational) -> Result<Option<Rational>> {
    let mut best: Option<Rational> = None;
    for sum in candidate_budgets(network)? {
        let overshoot = &sum - budget;
        if overshoot.is_positive() && best.as_ref().is_none_or(|b| &overshoot < b) {
            best = Some(overshoot);
        }
    }
    Ok(best)
}

/// A knapsack instance translated into a best-response instance.
#[derive(Debug, Clone)]
pub enum KnapsackReduction {
    /// No budget: the optimal value is 0 without running any solver.
    Degenerate,
    Instance(ReducedAttack),
}

#[derive(Debug, Clone)]
pub struct ReducedAttack {
    pub network: ParallelNetwork,
    pub route: FlowProfile,
    pub budget: Rational,
    pub epsilon: Rational,
}

/// Maps a knapsack instance onto an attack instance: capacities are item
/// weights, the budget is the knapsack capacity, and flows are `eps * v_e`
/// with `eps` placing the largest flow at half the smaller of the two
/// subset-sum margins around the budget, so the strict smallness condition
/// holds with room to spare.
///
/// Every item weight must be positive; callers pre-select zero-weight items.
pub fn knapsack_to_attack(kp: &KnapsackInstance) -> Result<KnapsackReduction> {
    for (i, item) in kp.items.iter().enumerate() {
        if !item.weight.is_positive() {
            return Err(Error::domain(format!(
                "item {i} has zero weight; pre-select it before reducing"
            )));
        }
    }
    if kp.items.is_empty() || !kp.capacity.is_positive() {
        return Ok(KnapsackReduction::Degenerate);
    }
    let network = ParallelNetwork::new(kp.items.iter().map(|i| i.weight.clone()).collect())?;
    // Budget beyond the total weight buys nothing; clamp so the attack
    // instance stays feasible.
    let total = network.total_capacity();
    let budget = if kp.capacity > total {
        total
    } else {
        kp.capacity.clone()
    };
    let mut margin = all_or_nothing_bound(&network, &budget)?;
    if let Some(overshoot) = min_overshoot(&network, &budget)? {
        if overshoot < margin {
            margin = overshoot;
        }
    }
    let max_value = kp
        .items
        .iter()
        .map(|i| &i.value)
        .max()
        .cloned()
        .expect("non-empty item list");
    let half = Rational::new(1.into(), 2.into());
    let mut epsilon = if max_value.is_positive() {
        margin * &half / max_value
    } else {
        Rational::from_integer(1.into())
    };
    // Flows must also fit on their own edges: eps * v_e <= w_e / 2.
    for item in &kp.items {
        if item.value.is_positive() {
            let bound = &item.weight * &half / &item.value;
            if bound < epsilon {
                epsilon = bound;
            }
        }
    }
    let route = FlowProfile::new(kp.items.iter().map(|i| &epsilon * &i.value).collect())?;
    Ok(KnapsackReduction::Instance(ReducedAttack {
        network,
        route,
        budget,
        epsilon,
    }))
}

/// Optimal knapsack value and selected items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackSolution {
    pub value: Rational,
    pub selection: BTreeSet<usize>,
}

/// Solves 0-1 knapsack by reduction to a best-response attack. Zero-weight
/// items are pre-selected (they cost nothing), the rest are mapped onto a
/// parallel network, and the selection is read off the blocked profile of
/// the optimal attack: an item is taken iff its edge is blocked in full.
pub fn solve_knapsack_via_attack(kp: &KnapsackInstance) -> Result<KnapsackSolution> {
    let mut selection: BTreeSet<usize> = BTreeSet::new();
    let mut preselected_value = Rational::zero();
    let mut kept: Vec<(usize, KnapsackItem)> = Vec::new();
    for (i, item) in kp.items.iter().enumerate() {
        if item.weight.is_zero() {
            selection.insert(i);
            preselected_value += &item.value;
        } else {
            kept.push((i, item.clone()));
        }
    }
    let reduced_kp = KnapsackInstance::new(
        kept.iter().map(|(_, item)| item.clone()).collect(),
        kp.capacity.clone(),
    )?;
    let reduction = knapsack_to_attack(&reduced_kp)?;
    let KnapsackReduction::Instance(reduced) = reduction else {
        return Ok(KnapsackSolution {
            value: preselected_value,
            selection,
        });
    };

    let result = best_response(&reduced.network, &reduced.route, &reduced.budget)?;
    let report = blocked(&reduced.network, &reduced.route, &result.attack)?;
    let mut blocked_value = Rational::zero();
    for (slot, per_edge) in report.per_edge.iter().enumerate() {
        if per_edge.is_zero() {
            continue;
        }
        if per_edge != &reduced.route[slot] {
            return Err(Error::Internal(format!(
                "reduced instance blocked edge {slot} partially: {per_edge} of {}",
                reduced.route[slot]
            )));
        }
        selection.insert(kept[slot].0);
        blocked_value += &kept[slot].1.value;
    }
    let scaled = &result.value / &reduced.epsilon;
    if scaled != blocked_value {
        return Err(Error::Internal(format!(
            "blocked total / epsilon = {scaled} disagrees with selected value {blocked_value}"
        )));
    }
    Ok(KnapsackSolution {
        value: preselected_value + blocked_value,
        selection,
    })
}

/// Classic pseudo-polynomial 0-1 knapsack dynamic program, exact over
/// rationals after clearing weight denominators. Independent of the
/// attack-based path; used to cross-check it.
pub fn knapsack_dp(kp: &KnapsackInstance) -> Result<Rational> {
    if kp.items.is_empty() {
        return Ok(Rational::zero());
    }
    let mut denom = BigInt::from(1);
    for item in &kp.items {
        denom = denom.lcm(item.weight.denom());
    }
    denom = denom.lcm(kp.capacity.denom());
    let unit = Rational::new(BigInt::from(1), denom);
    let capacity_units = (&kp.capacity / &unit)
        .to_integer()
        .to_u64()
        .ok_or(Error::TooLarge {
            what: "knapsack capacity units",
            cap: MAX_DP_UNITS,
            got: u64::MAX,
            hint: "weights need a smaller common denominator",
        })?;
    if capacity_units > MAX_DP_UNITS {
        return Err(Error::TooLarge {
            what: "knapsack capacity units",
            cap: MAX_DP_UNITS,
            got: capacity_units,
            hint: "weights need a smaller common denominator",
        });
    }
    let capacity_units = capacity_units as usize;
    let mut table = vec![Rational::zero(); capacity_units + 1];
    for item in &kp.items {
        let weight_units =
            (&item.weight / &unit)
                .to_integer()
                .to_usize()
                .ok_or(Error::TooLarge {
                    what: "knapsack item weight units",
                    cap: MAX_DP_UNITS,
                    got: u64::MAX,
                    hint: "weights need a smaller common denominator",
                })?;
        if weight_units > capacity_units {
            continue;
        }
        for w in (weight_units..=capacity_units).rev() {
            let candidate = &table[w - weight_units] + &item.value;
            if candidate > table[w] {
                table[w] = candidate;
            }
        }
    }
    Ok(table[capacity_units].clone())
}
