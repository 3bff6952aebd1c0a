//! Data model for routing games on parallel networks.
//!
//! A parallel network is nothing but an ordered multiset of edge capacities;
//! edges are identified by position. Routing and attack profiles are both
//! per-edge traffic assignments, and the only payoff in the game is the
//! blocked-traffic functional `B(f, f^a, c) = sum_e max(f_e + f^a_e - c_e, 0)`.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{pos_part, Rational};

/// A single-source / single-destination network of parallel edges, described
/// by one capacity per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelNetwork {
    capacities: Vec<Rational>,
}

impl ParallelNetwork {
    /// Builds a network from edge capacities. The list must be non-empty and
    /// every capacity must be nonnegative.
    pub fn new(capacities: Vec<Rational>) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::domain("a parallel network needs at least one edge"));
        }
        if let Some(c) = capacities.iter().find(|c| c < &&Rational::zero()) {
            return Err(Error::domain(format!("negative edge capacity {c}")));
        }
        Ok(ParallelNetwork { capacities })
    }

    pub fn from_ints(capacities: &[i64]) -> Self {
        ParallelNetwork::new(
            capacities
                .iter()
                .map(|&c| crate::rational::rat(c))
                .collect(),
        )
        .expect("integer capacities are valid")
    }

    pub fn edge_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacity(&self, edge: usize) -> &Rational {
        &self.capacities[edge]
    }

    pub fn capacities(&self) -> &[Rational] {
        &self.capacities
    }

    /// Total capacity `C(E)`.
    pub fn total_capacity(&self) -> Rational {
        self.capacities.iter().sum()
    }

    /// Capacity `C(E')` of a subset of edges; `C(empty) = 0`.
    pub fn subset_capacity<I>(&self, subset: I) -> Result<Rational>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut total = Rational::zero();
        for edge in subset {
            if edge >= self.capacities.len() {
                return Err(Error::Index {
                    index: edge,
                    edges: self.capacities.len(),
                });
            }
            total += &self.capacities[edge];
        }
        Ok(total)
    }

    pub(crate) fn check_shape(&self, profile: &FlowProfile) -> Result<()> {
        if profile.flows.len() != self.capacities.len() {
            return Err(Error::Shape {
                expected: self.capacities.len(),
                got: profile.flows.len(),
            });
        }
        Ok(())
    }
}

/// A per-edge traffic assignment. Used both for the router's profile `f`
/// and the attacker's profile `f^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowProfile {
    flows: Vec<Rational>,
}

impl FlowProfile {
    /// Builds a profile; every entry must be nonnegative.
    pub fn new(flows: Vec<Rational>) -> Result<Self> {
        if let Some(f) = flows.iter().find(|f| f < &&Rational::zero()) {
            return Err(Error::domain(format!("negative flow entry {f}")));
        }
        Ok(FlowProfile { flows })
    }

    pub fn from_ints(flows: &[i64]) -> Self {
        FlowProfile::new(flows.iter().map(|&f| crate::rational::rat(f)).collect())
            .expect("integer flows are valid")
    }

    pub fn zeros(len: usize) -> Self {
        FlowProfile {
            flows: vec![Rational::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn flow(&self, edge: usize) -> &Rational {
        &self.flows[edge]
    }

    pub fn flows(&self) -> &[Rational] {
        &self.flows
    }

    pub fn total(&self) -> Rational {
        self.flows.iter().sum()
    }

    /// Samples a uniform-ish feasible profile: nonnegative entries within the
    /// edge capacities summing exactly to `total`. Randomizes proportions,
    /// then repairs cap overflows exactly. Errors if `total > C(E)`.
    pub fn random_feasible<R: Rng + ?Sized>(
        network: &ParallelNetwork,
        total: &Rational,
        rng: &mut R,
    ) -> Result<Self> {
        if total < &Rational::zero() || total > &network.total_capacity() {
            return Err(Error::domain(format!(
                "cannot place {total} units into capacity {}",
                network.total_capacity()
            )));
        }
        let n = network.edge_count();
        let weights: Vec<Rational> = (0..n)
            .map(|_| crate::rational::rat(rng.gen_range(1..=1000)))
            .collect();
        let weight_sum: Rational = weights.iter().sum();
        let mut flows: Vec<Rational> = weights.iter().map(|w| total * w / &weight_sum).collect();
        // Push any per-edge overflow onto edges that still have room.
        let mut spill = Rational::zero();
        for (e, f) in flows.iter_mut().enumerate() {
            let cap = network.capacity(e);
            if &*f > cap {
                spill += &*f - cap;
                *f = cap.clone();
            }
        }
        let mut e = 0;
        while spill.is_positive() && e < n {
            let room = network.capacity(e) - &flows[e];
            let add = if spill <= room { spill.clone() } else { room };
            flows[e] += &add;
            spill -= add;
            e += 1;
        }
        debug_assert!(spill.is_zero());
        Ok(FlowProfile { flows })
    }
}

impl std::ops::Index<usize> for FlowProfile {
    type Output = Rational;
    fn index(&self, edge: usize) -> &Rational {
        &self.flows[edge]
    }
}

/// A network together with the legitimate demand `r` and the attack budget
/// `r^a`. Both must fit inside the total capacity for the respective
/// feasible sets to be nonempty.
#[derive(Debug, Clone)]
pub struct GameInstance {
    pub network: ParallelNetwork,
    pub demand: Rational,
    pub budget: Rational,
}

impl GameInstance {
    pub fn new(network: ParallelNetwork, demand: Rational, budget: Rational) -> Result<Self> {
        let cap = network.total_capacity();
        if demand < Rational::zero() || demand > cap {
            return Err(Error::domain(format!(
                "demand {demand} outside [0, {cap}]; no feasible route exists"
            )));
        }
        if budget < Rational::zero() || budget > cap {
            return Err(Error::domain(format!(
                "attack budget {budget} outside [0, {cap}]; no feasible attack exists"
            )));
        }
        Ok(GameInstance {
            network,
            demand,
            budget,
        })
    }
}

/// Per-edge and total blocked traffic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub per_edge: Vec<Rational>,
    pub total: Rational,
}

/// Evaluates the blocked traffic `B_e = max(f_e + f^a_e - c_e, 0)` on every
/// edge and its sum. This is a pure evaluator: neither profile needs to be
/// feasible, only the shapes must match.
pub fn blocked(
    network: &ParallelNetwork,
    route: &FlowProfile,
    attack: &FlowProfile,
) -> Result<BlockReport> {
    network.check_shape(route)?;
    network.check_shape(attack)?;
    let per_edge: Vec<Rational> = (0..network.edge_count())
        .map(|e| pos_part(&(&route[e] + &attack[e] - network.capacity(e))))
        .collect();
    let total = per_edge.iter().sum();
    Ok(BlockReport { per_edge, total })
}

/// True iff the profile routes exactly `total` units and respects the
/// per-edge capacity bounds. The same check serves routes (with `r`) and
/// attacks (with `r^a`).
pub fn is_feasible_profile(
    network: &ParallelNetwork,
    total: &Rational,
    profile: &FlowProfile,
) -> Result<bool> {
    network.check_shape(profile)?;
    let within_caps = (0..network.edge_count())
        .all(|e| profile[e] >= Rational::zero() && &profile[e] <= network.capacity(e));
    Ok(within_caps && &profile.total() == total)
}
