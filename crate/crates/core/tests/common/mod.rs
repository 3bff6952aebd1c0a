//! Shared helpers for the integration suites: seeded generators and
//! independent brute-force oracles (subset enumeration, never prefix scans).

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use routegame::rational::{frac, rat, Rational};
use routegame::{FlowProfile, ParallelNetwork};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random network with integer capacities in `1..=max_cap`.
pub fn random_int_network(rng: &mut ChaCha8Rng, edges: usize, max_cap: i64) -> ParallelNetwork {
    let caps: Vec<Rational> = (0..edges)
        .map(|_| rat(rng.gen_range(1..=max_cap)))
        .collect();
    ParallelNetwork::new(caps).unwrap()
}

/// Random network with quarter-grained rational capacities.
pub fn random_quarter_network(rng: &mut ChaCha8Rng, edges: usize, max_cap: i64) -> ParallelNetwork {
    let caps: Vec<Rational> = (0..edges)
        .map(|_| frac(rng.gen_range(1..=max_cap * 4), 4))
        .collect();
    ParallelNetwork::new(caps).unwrap()
}

/// Random rational in `[0, hi]` with denominator dividing `denom`.
pub fn random_rational_below(rng: &mut ChaCha8Rng, hi: &Rational, denom: i64) -> Rational {
    let steps = (hi * rat(denom)).floor();
    let steps: i64 = routegame::rational::to_f64(&steps) as i64;
    if steps <= 0 {
        return rat(0);
    }
    frac(rng.gen_range(0..=steps), denom)
}

/// Random feasible profile with integer entries summing to `total`.
pub fn random_integer_profile(
    network: &ParallelNetwork,
    total: i64,
    rng: &mut ChaCha8Rng,
) -> FlowProfile {
    let n = network.edge_count();
    let mut flows = vec![rat(0); n];
    let one = rat(1);
    'units: for _ in 0..total {
        for _ in 0..64 {
            let e = rng.gen_range(0..n);
            if &(&flows[e] + &one) <= network.capacity(e) {
                flows[e] += &one;
                continue 'units;
            }
        }
        // Dense fallback: first edge with room.
        for (e, flow) in flows.iter_mut().enumerate() {
            if &(&*flow + &one) <= network.capacity(e) {
                *flow += &one;
                continue 'units;
            }
        }
        panic!("total exceeds capacity");
    }
    FlowProfile::new(flows).unwrap()
}

/// Brute-force maximum of `(C(E') - base) / |E'|` over all nonempty subsets.
pub fn brute_force_prefix_max(network: &ParallelNetwork, base: &Rational) -> Rational {
    let n = network.edge_count();
    let mut best: Option<Rational> = None;
    for mask in 1u64..(1 << n) {
        let mut sum = rat(0);
        let mut size = 0i64;
        for e in 0..n {
            if mask & (1 << e) != 0 {
                sum += network.capacity(e);
                size += 1;
            }
        }
        let value = (sum - base) / rat(size);
        if best.as_ref().is_none_or(|b| &value > b) {
            best = Some(value);
        }
    }
    best.unwrap()
}

pub fn brute_force_g(network: &ParallelNetwork, demand: &Rational) -> Rational {
    brute_force_prefix_max(network, demand)
}

pub fn brute_force_h(network: &ParallelNetwork, demand: &Rational) -> Rational {
    let base = network.total_capacity() - demand;
    brute_force_prefix_max(network, &base)
}
