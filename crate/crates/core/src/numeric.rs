//! Float-space machinery behind the numerical minimax solvers.
//!
//! The outer Stackelberg problem minimizes a convex piecewise-linear
//! function of the route (a max over finitely many affine pieces, one per
//! attack structure), so projected subgradient iterations converge in value.
//! Exact rational arithmetic would blow up denominators under diminishing
//! steps; instead the loop runs in `f64` and the final iterate is snapped
//! back to clean rationals and re-certified exactly.
//!
//! Lower bounds come from weak duality: for any fixed mixture of feasible
//! attacks, `min_f E[B(f, a) - offset]` is a separable convex problem solved
//! exactly by marginal-cost water-filling, and its value never exceeds the
//! minimax value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::model::{FlowProfile, ParallelNetwork};
use crate::rational::{approx_rational, Rational};

pub(crate) fn to_f64_vec(values: &[Rational]) -> Vec<f64> {
    values.iter().map(crate::rational::to_f64).collect()
}

/// Blocked traffic in float space.
pub(crate) fn blocked_f64(caps: &[f64], route: &[f64], attack: &[f64]) -> f64 {
    route
        .iter()
        .zip(attack)
        .zip(caps)
        .map(|((f, a), c)| (f + a - c).max(0.0))
        .sum()
}

/// Best-response value and witness attack in float space: the same
/// saturated-set enumeration as the exact solver, without tie bookkeeping.
pub(crate) fn best_response_f64(caps: &[f64], route: &[f64], budget: f64) -> (f64, Vec<f64>) {
    let n = caps.len();
    let mut suffix_flow = vec![0.0; n + 1];
    for e in (0..n).rev() {
        suffix_flow[e] = suffix_flow[e + 1] + route[e];
    }
    let mut best_val = -1.0;
    let mut best_choice = (0u32, usize::MAX);

    struct Frame {
        edge: usize,
        mask: u32,
        cap_sum: f64,
        flow_sum: f64,
        max_flow_excluded: f64,
    }
    let mut stack = vec![Frame {
        edge: 0,
        mask: 0,
        cap_sum: 0.0,
        flow_sum: 0.0,
        max_flow_excluded: 0.0,
    }];
    while let Some(frame) = stack.pop() {
        if frame.flow_sum + suffix_flow[frame.edge] + frame.max_flow_excluded < best_val {
            continue;
        }
        if frame.edge == n {
            let residual = budget - frame.cap_sum;
            let mut gain = 0.0;
            let mut gain_edge = usize::MAX;
            for e in 0..n {
                if frame.mask & (1 << e) != 0 {
                    continue;
                }
                let g = (residual - (caps[e] - route[e])).clamp(0.0, route[e]);
                if g > gain {
                    gain = g;
                    gain_edge = e;
                }
            }
            let value = frame.flow_sum + gain;
            if value > best_val {
                best_val = value;
                best_choice = (frame.mask, gain_edge);
            }
            continue;
        }
        let e = frame.edge;
        stack.push(Frame {
            edge: e + 1,
            mask: frame.mask,
            cap_sum: frame.cap_sum,
            flow_sum: frame.flow_sum,
            max_flow_excluded: frame.max_flow_excluded.max(route[e]),
        });
        if frame.cap_sum + caps[e] <= budget + 1e-12 {
            stack.push(Frame {
                edge: e + 1,
                mask: frame.mask | (1 << e),
                cap_sum: frame.cap_sum + caps[e],
                flow_sum: frame.flow_sum + route[e],
                max_flow_excluded: frame.max_flow_excluded,
            });
        }
    }

    let (mask, gain_edge) = best_choice;
    (
        best_val.max(0.0),
        assemble_attack_f64(caps, route, budget, mask, gain_edge),
    )
}

/// Saturate the set, fill the partial edge, dump the rest wherever capacity
/// remains.
fn assemble_attack_f64(
    caps: &[f64],
    route: &[f64],
    budget: f64,
    mask: u32,
    gain_edge: usize,
) -> Vec<f64> {
    let n = caps.len();
    let mut attack = vec![0.0; n];
    let mut remaining = budget;
    for e in 0..n {
        if mask & (1 << e) != 0 {
            attack[e] = caps[e];
            remaining -= caps[e];
        }
    }
    if gain_edge != usize::MAX {
        let amount = remaining.min(caps[gain_edge]);
        attack[gain_edge] = amount;
        remaining -= amount;
    }
    for e in 0..n {
        if remaining <= 1e-12 {
            break;
        }
        let room = (caps[e] - attack[e]).min((caps[e] - route[e] - attack[e]).max(0.0));
        let add = room.min(remaining);
        if add > 0.0 {
            attack[e] += add;
            remaining -= add;
        }
    }
    if remaining > 1e-12 {
        for e in 0..n {
            let room = caps[e] - attack[e];
            let add = room.min(remaining);
            attack[e] += add;
            remaining -= add;
            if remaining <= 1e-12 {
                break;
            }
        }
    }
    attack
}

/// Attacks of every structure whose value comes within `slack` of the best
/// response at `route`. At the optimum several structures usually tie, and a
/// tight certificate mixture needs all of them, not just the one witness the
/// iteration happened to see. Capped at 16 attacks, best first; empty above
/// 14 edges.
pub(crate) fn near_best_attacks_f64(
    caps: &[f64],
    route: &[f64],
    budget: f64,
    slack: f64,
) -> Vec<Vec<f64>> {
    let n = caps.len();
    if n > 14 {
        return Vec::new();
    }
    let mut entries: Vec<(f64, u32, usize)> = Vec::new();
    let mut best_val = 0.0f64;
    for mask in 0u32..(1 << n) {
        let mut cap_sum = 0.0;
        let mut flow_sum = 0.0;
        for e in 0..n {
            if mask & (1 << e) != 0 {
                cap_sum += caps[e];
                flow_sum += route[e];
            }
        }
        if cap_sum > budget + 1e-12 {
            continue;
        }
        let residual = budget - cap_sum;
        entries.push((flow_sum, mask, usize::MAX));
        best_val = best_val.max(flow_sum);
        for e in 0..n {
            if mask & (1 << e) != 0 {
                continue;
            }
            let gain = (residual - (caps[e] - route[e])).clamp(0.0, route[e]);
            if gain > 0.0 {
                entries.push((flow_sum + gain, mask, e));
                best_val = best_val.max(flow_sum + gain);
            }
        }
    }
    entries.retain(|(value, _, _)| *value >= best_val - slack);
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    entries.truncate(16);
    entries
        .into_iter()
        .map(|(_, mask, gain_edge)| assemble_attack_f64(caps, route, budget, mask, gain_edge))
        .collect()
}

/// Euclidean projection onto `{x : sum x = total, 0 <= x_e <= cap_e}` by
/// solving for the threshold tau with `sum clamp(y_e - tau, 0, cap_e) = total`.
pub(crate) fn project_box_simplex(y: &[f64], caps: &[f64], total: f64) -> Vec<f64> {
    let cap_total: f64 = caps.iter().sum();
    if total <= 0.0 {
        return vec![0.0; y.len()];
    }
    if total >= cap_total {
        return caps.to_vec();
    }
    let mass = |tau: f64| -> f64 {
        y.iter()
            .zip(caps)
            .map(|(yi, ci)| (yi - tau).clamp(0.0, *ci))
            .sum()
    };
    let mut breakpoints: Vec<f64> = y
        .iter()
        .zip(caps)
        .flat_map(|(yi, ci)| [*yi, yi - ci])
        .collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // mass is nonincreasing in tau; find the bracketing segment.
    let mut lo = breakpoints[0];
    let mut hi = breakpoints[breakpoints.len() - 1];
    if mass(lo) < total {
        lo = hi - (cap_total.max(1.0) + total);
    }
    if mass(hi) > total {
        hi += cap_total.max(1.0) + total;
    }
    for bp in &breakpoints {
        if mass(*bp) >= total {
            lo = lo.max(*bp);
        }
        if mass(*bp) <= total {
            hi = hi.min(*bp);
        }
    }
    // Within the bracket the active set is fixed and mass is linear in tau.
    let active: usize = y
        .iter()
        .zip(caps)
        .filter(|(yi, ci)| {
            let mid = 0.5 * (lo + hi);
            let v = *yi - mid;
            v > 0.0 && v < **ci
        })
        .count();
    let tau = if active == 0 {
        0.5 * (lo + hi)
    } else {
        lo + (mass(lo) - total) / active as f64
    };
    y.iter()
        .zip(caps)
        .map(|(yi, ci)| (yi - tau).clamp(0.0, *ci))
        .collect()
}

/// One affine piece of the objective: `B(f, attack) - offset`.
pub(crate) struct PoolPiece {
    pub tag: usize,
    pub attack: Vec<f64>,
    pub offset: f64,
}

/// Greedy marginal-cost pouring for a separable convex piecewise-linear
/// objective: each edge's cost rate steps up at its thresholds, and demand
/// always flows into the currently cheapest edge with room.
fn waterfill_generic<T>(caps: &[T], demand: &T, thresholds: &mut [Vec<(T, T)>]) -> T
where
    T: Clone + PartialOrd + Zero + std::ops::Mul<Output = T>,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T> + std::ops::Sub<&'a T, Output = T>,
{
    let n = caps.len();
    for list in thresholds.iter_mut() {
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    let mut level: Vec<T> = vec![T::zero(); n];
    let mut rate: Vec<T> = vec![T::zero(); n];
    let mut next_idx: Vec<usize> = vec![0; n];
    let activate = |e: usize, level: &T, rate: &mut T, next_idx: &mut usize| {
        while *next_idx < thresholds[e].len() && &thresholds[e][*next_idx].0 <= level {
            *rate = &*rate + &thresholds[e][*next_idx].1;
            *next_idx += 1;
        }
    };
    for e in 0..n {
        activate(e, &level[e], &mut rate[e], &mut next_idx[e]);
    }
    let mut remaining = demand.clone();
    let mut cost = T::zero();
    while remaining > T::zero() {
        let mut pick: Option<usize> = None;
        for e in 0..n {
            if level[e] >= caps[e] {
                continue;
            }
            if pick.is_none_or(|p| rate[e] < rate[p]) {
                pick = Some(e);
            }
        }
        let e = pick.expect("demand fits inside total capacity");
        let ceiling = if next_idx[e] < thresholds[e].len() && thresholds[e][next_idx[e]].0 < caps[e]
        {
            thresholds[e][next_idx[e]].0.clone()
        } else {
            caps[e].clone()
        };
        let room = &ceiling - &level[e];
        let pour = if room < remaining {
            room
        } else {
            remaining.clone()
        };
        cost = &cost + &(rate[e].clone() * pour.clone());
        level[e] = &level[e] + &pour;
        remaining = &remaining - &pour;
        activate(e, &level[e], &mut rate[e], &mut next_idx[e]);
    }
    cost
}

/// `min_f sum_j mu_j * (B(f, a_j) - offset_j)` over feasible routes, in
/// float space. The per-edge cost is convex piecewise linear with slope
/// steps at `c_e - a_{j,e}`, so greedy marginal-cost pouring is exact.
pub(crate) fn min_weighted_blocked_f64(
    caps: &[f64],
    demand: f64,
    pieces: &[(&[f64], f64, f64)], // (attack, weight, offset)
) -> f64 {
    let n = caps.len();
    let mut thresholds: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    let mut offset_total = 0.0;
    for (attack, weight, offset) in pieces {
        offset_total += weight * offset;
        for e in 0..n {
            thresholds[e].push(((caps[e] - attack[e]).max(0.0), *weight));
        }
    }
    let cost = waterfill_generic(caps, &demand, &mut thresholds);
    cost - offset_total
}

/// Exact-rational version of [`min_weighted_blocked_f64`]; the certificate
/// path. Attacks must be feasible profiles, weights a subprobability vector.
pub(crate) fn min_weighted_blocked_exact(
    network: &ParallelNetwork,
    demand: &Rational,
    pieces: &[(FlowProfile, Rational, Rational)],
) -> Rational {
    let n = network.edge_count();
    let mut thresholds: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); n];
    let mut offset_total = Rational::zero();
    for (attack, weight, offset) in pieces {
        offset_total += weight * offset;
        for e in 0..n {
            let t = network.capacity(e) - &attack[e];
            thresholds[e].push((crate::rational::pos_part(&t), weight.clone()));
        }
    }
    let caps: Vec<Rational> = network.capacities().to_vec();
    let cost = waterfill_generic(&caps, demand, &mut thresholds);
    cost - offset_total
}

/// Searches mixture weights maximizing the water-filling lower bound: all
/// even pairs first (small dual supports are common and a pair is often
/// exact), ternary refinement of the best pair (the bound is concave along
/// a segment), then projected supergradient ascent over the full simplex.
/// Returns the best weights found (same order as `pieces`) and the float
/// bound they certify.
pub(crate) fn optimize_mixture_f64(
    caps: &[f64],
    demand: f64,
    pieces: &[PoolPiece],
    iterations: usize,
) -> (Vec<f64>, f64) {
    let m = pieces.len();
    if m == 0 {
        return (Vec::new(), f64::NEG_INFINITY);
    }
    let eval = |mu: &[f64]| -> f64 {
        let weighted: Vec<(&[f64], f64, f64)> = pieces
            .iter()
            .zip(mu)
            .filter(|(_, w)| **w > 0.0)
            .map(|(p, w)| (p.attack.as_slice(), *w, p.offset))
            .collect();
        if weighted.is_empty() {
            return f64::NEG_INFINITY;
        }
        min_weighted_blocked_f64(caps, demand, &weighted)
    };

    let mut best_mu = vec![1.0 / m as f64; m];
    let mut best_lb = eval(&best_mu);

    let pair_eval = |i: usize, j: usize, t: f64| -> f64 {
        min_weighted_blocked_f64(
            caps,
            demand,
            &[
                (pieces[i].attack.as_slice(), t, pieces[i].offset),
                (pieces[j].attack.as_slice(), 1.0 - t, pieces[j].offset),
            ],
        )
    };
    let mut best_pair: Option<(usize, usize)> = None;
    for i in 0..m {
        for j in (i + 1)..m {
            let lb = pair_eval(i, j, 0.5);
            if lb > best_lb {
                best_lb = lb;
                best_pair = Some((i, j));
                best_mu = vec![0.0; m];
                best_mu[i] = 0.5;
                best_mu[j] = 0.5;
            }
        }
    }
    if let Some((i, j)) = best_pair {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..40 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if pair_eval(i, j, a) < pair_eval(i, j, b) {
                lo = a;
            } else {
                hi = b;
            }
        }
        let t = 0.5 * (lo + hi);
        let lb = pair_eval(i, j, t);
        if lb > best_lb {
            best_lb = lb;
            best_mu = vec![0.0; m];
            best_mu[i] = t;
            best_mu[j] = 1.0 - t;
        }
    }

    // Ascent from the best support found, slightly smoothed so every piece
    // can re-enter.
    let mut mu: Vec<f64> = best_mu.iter().map(|w| 0.9 * w + 0.1 / m as f64).collect();
    for k in 1..=iterations {
        // Supergradient: the value of each piece at the current argmin route.
        let weighted: Vec<(&[f64], f64, f64)> = pieces
            .iter()
            .zip(&mu)
            .map(|(p, w)| (p.attack.as_slice(), *w, p.offset))
            .collect();
        let route = argmin_route_f64(caps, demand, &weighted);
        let grad: Vec<f64> = pieces
            .iter()
            .map(|p| blocked_f64(caps, &route, &p.attack) - p.offset)
            .collect();
        let norm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt().max(1e-9);
        let step = 0.4 / (k as f64).sqrt();
        let moved: Vec<f64> = mu
            .iter()
            .zip(&grad)
            .map(|(w, g)| w + step * g / norm)
            .collect();
        mu = project_simplex(&moved);
        let lb = eval(&mu);
        if lb > best_lb {
            best_lb = lb;
            best_mu = mu.clone();
        }
    }

    // Coordinate polish on longer runs: redistribute weight between two
    // pieces at a time by ternary search, over the heaviest support.
    if iterations >= 100 && m >= 3 {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| best_mu[b].partial_cmp(&best_mu[a]).unwrap());
        let support: Vec<usize> = order.into_iter().take(10).collect();
        let mut mu = best_mu.clone();
        for _ in 0..4 {
            let mut improved = false;
            for a in 0..support.len() {
                for b in (a + 1)..support.len() {
                    let (i, j) = (support[a], support[b]);
                    let total = mu[i] + mu[j];
                    if total <= 1e-9 {
                        continue;
                    }
                    let transfer_eval = |t: f64, mu: &mut Vec<f64>| -> f64 {
                        mu[i] = t;
                        mu[j] = total - t;
                        eval(mu)
                    };
                    let (mut lo, mut hi) = (0.0, total);
                    for _ in 0..24 {
                        let p = lo + (hi - lo) / 3.0;
                        let q = hi - (hi - lo) / 3.0;
                        if transfer_eval(p, &mut mu) < transfer_eval(q, &mut mu) {
                            lo = p;
                        } else {
                            hi = q;
                        }
                    }
                    let lb = transfer_eval(0.5 * (lo + hi), &mut mu);
                    if lb > best_lb + 1e-12 {
                        best_lb = lb;
                        best_mu = mu.clone();
                        improved = true;
                    } else {
                        mu[i] = best_mu[i];
                        mu[j] = best_mu[j];
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    (best_mu, best_lb)
}

/// The route minimizing the weighted blocked cost (float water-filling with
/// explicit allocations, used only to get supergradients for the mixture).
fn argmin_route_f64(caps: &[f64], demand: f64, pieces: &[(&[f64], f64, f64)]) -> Vec<f64> {
    let n = caps.len();
    let mut thresholds: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    for (attack, weight, _) in pieces {
        for e in 0..n {
            thresholds[e].push(((caps[e] - attack[e]).max(0.0), *weight));
        }
    }
    for list in thresholds.iter_mut() {
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    let mut level = vec![0.0; n];
    let mut rate = vec![0.0; n];
    let mut next_idx = vec![0usize; n];
    for e in 0..n {
        while next_idx[e] < thresholds[e].len() && thresholds[e][next_idx[e]].0 <= level[e] {
            rate[e] += thresholds[e][next_idx[e]].1;
            next_idx[e] += 1;
        }
    }
    let mut remaining = demand;
    while remaining > 1e-12 {
        let mut pick = usize::MAX;
        for e in 0..n {
            if level[e] >= caps[e] - 1e-15 {
                continue;
            }
            if pick == usize::MAX || rate[e] < rate[pick] {
                pick = e;
            }
        }
        if pick == usize::MAX {
            break;
        }
        let e = pick;
        let ceiling = if next_idx[e] < thresholds[e].len() && thresholds[e][next_idx[e]].0 < caps[e]
        {
            thresholds[e][next_idx[e]].0
        } else {
            caps[e]
        };
        let pour = (ceiling - level[e]).min(remaining).max(1e-15);
        level[e] += pour;
        remaining -= pour;
        while next_idx[e] < thresholds[e].len() && thresholds[e][next_idx[e]].0 <= level[e] {
            rate[e] += thresholds[e][next_idx[e]].1;
            next_idx[e] += 1;
        }
    }
    level
}

fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if v - candidate > 0.0 {
            tau = candidate;
        }
    }
    y.iter().map(|v| (v - tau).max(0.0)).collect()
}

pub(crate) struct SubgradientOutcome {
    pub best_x: Vec<f64>,
    pub pool: Vec<PoolPiece>,
    pub iterations: usize,
}

/// Objective callback: value at the route, plus the witness attack, piece
/// tag and offset of an active piece.
pub(crate) type ObjectiveEval<'a> = dyn FnMut(&[f64]) -> (f64, Vec<f64>, usize, f64) + 'a;

/// Projected subgradient descent of `max_pieces (B(f, attack) - offset)`
/// over the feasible route polytope.
///
/// The subgradient at a route is the blocked-edge indicator of the witness
/// attack. Steps are Polyak-sized against the best water-filling lower
/// bound when one is available, falling back to a diminishing `s0/sqrt(k)`
/// schedule; `max_iter` is the budget per start.
pub(crate) fn subgradient_minimize(
    caps: &[f64],
    demand: f64,
    starts: &[Vec<f64>],
    max_iter: usize,
    tolerance: f64,
    eval: &mut ObjectiveEval,
) -> SubgradientOutcome {
    let n = caps.len();
    let mut pool: Vec<PoolPiece> = Vec::new();
    let mut best_x = starts.first().cloned().unwrap_or_else(|| vec![0.0; n]);
    let mut best_value = f64::INFINITY;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut iterations = 0;

    let push_pool = |pool: &mut Vec<PoolPiece>, tag: usize, attack: &[f64], offset: f64| {
        let duplicate = pool.iter().any(|p| {
            p.tag == tag
                && p.attack
                    .iter()
                    .zip(attack)
                    .all(|(a, b)| (a - b).abs() < 1e-9)
        });
        if !duplicate && pool.len() < 48 {
            pool.push(PoolPiece {
                tag,
                attack: attack.to_vec(),
                offset,
            });
        }
    };

    let per_start = max_iter.max(1);
    'starts: for start in starts {
        let mut x = project_box_simplex(start, caps, demand);
        let mut step_scale = 1.0;
        let mut since_improve = 0usize;
        for k in 1..=per_start {
            iterations += 1;
            let (value, attack, tag, offset) = eval(&x);
            push_pool(&mut pool, tag, &attack, offset);
            if value < best_value {
                best_value = value;
                best_x = x.clone();
                since_improve = 0;
            } else {
                since_improve += 1;
            }
            // Refresh the lower bound periodically once the pool has content.
            if k % 40 == 1 && !pool.is_empty() {
                let (_mu, lb) = optimize_mixture_f64(caps, demand, &pool, 30);
                if lb > lower_bound {
                    lower_bound = lb;
                }
            }
            if best_value - lower_bound <= 0.5 * tolerance {
                break 'starts;
            }
            let grad: Vec<f64> = x
                .iter()
                .zip(&attack)
                .zip(caps)
                .map(|((f, a), c)| if f + a - c > 1e-12 { 1.0 } else { 0.0 })
                .collect();
            let norm_sq: f64 = grad.iter().map(|g| g * g).sum();
            if norm_sq == 0.0 {
                // Nothing blocked: the objective cannot go below this piece.
                continue;
            }
            if since_improve > 0 && since_improve.is_multiple_of(150) {
                step_scale *= 0.5;
            }
            let fallback = demand.max(1.0) / (k as f64).sqrt();
            let step = if lower_bound > f64::NEG_INFINITY && best_value - lower_bound > 0.0 {
                ((value - lower_bound).max(0.0) / norm_sq).min(fallback) * step_scale
            } else {
                fallback * step_scale
            };
            let moved: Vec<f64> = x.iter().zip(&grad).map(|(f, g)| f - step * g).collect();
            x = project_box_simplex(&moved, caps, demand);
        }
    }

    SubgradientOutcome {
        best_x,
        pool,
        iterations,
    }
}

/// Snaps a float route to an exact feasible profile with the given
/// denominator: round, clamp to capacities, then repair the sum exactly.
pub(crate) fn snap_profile_with_denominator(
    network: &ParallelNetwork,
    total: &Rational,
    x: &[f64],
    denominator: &BigInt,
) -> Result<FlowProfile> {
    let denom = Rational::from_integer(denominator.clone());
    let mut flows: Vec<Rational> = x
        .iter()
        .enumerate()
        .map(|(e, v)| {
            let scaled = (v * crate::rational::to_f64(&denom)).round();
            let raw = Rational::new(BigInt::from(scaled.max(0.0) as i128), denominator.clone());
            if &raw > network.capacity(e) {
                network.capacity(e).clone()
            } else {
                raw
            }
        })
        .collect();
    let mut diff = total - flows.iter().sum::<Rational>();
    let n = network.edge_count();
    let mut e = 0;
    while diff.is_positive() && e < n {
        let room = network.capacity(e) - &flows[e];
        let add = if diff <= room { diff.clone() } else { room };
        flows[e] += &add;
        diff -= add;
        e += 1;
    }
    e = 0;
    while diff.is_negative() && e < n {
        let take = if -diff.clone() <= flows[e] {
            -diff.clone()
        } else {
            flows[e].clone()
        };
        flows[e] -= &take;
        diff += take;
        e += 1;
    }
    FlowProfile::new(flows)
}

/// Candidate denominators for snapping: small multiples of the instance's
/// own denominators (optima average a handful of structure equations, so
/// they live on coarse grids like /2, /5, /12) plus fine fallbacks.
pub(crate) fn snap_denominators(values: impl Iterator<Item = Rational>) -> Vec<BigInt> {
    let mut lcm = BigInt::from(1);
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let mut out: Vec<BigInt> = (1u32..=16)
        .chain([20, 24, 30, 36, 42, 48, 60, 120])
        .map(|k| &lcm * BigInt::from(k))
        .collect();
    out.push(BigInt::from(1_000_000u64));
    out.push(BigInt::from(1_000_000_000_000i64));
    out.sort();
    out.dedup();
    out
}

/// Turns float mixture weights into an exact subprobability vector.
pub(crate) fn snap_mixture(mu: &[f64], max_denominator: u64) -> Vec<Rational> {
    let mut weights: Vec<Rational> = mu
        .iter()
        .map(|w| {
            if *w <= 1e-9 {
                Rational::zero()
            } else {
                approx_rational(*w, max_denominator)
            }
        })
        .collect();
    let total: Rational = weights.iter().sum();
    if total.is_positive() {
        for w in weights.iter_mut() {
            *w /= &total;
        }
    }
    weights
}

/// Denominator ladder for snapping mixture weights: tight duals usually
/// have simple fractional weights, so coarse snaps often recover them
/// exactly where the fine snap only reproduces float noise.
pub(crate) const MIXTURE_DENOMINATORS: [u64; 4] = [60, 2520, 720_720, 100_000_000];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    #[test]
    fn projection_respects_box_and_sum() {
        let caps = [2.0, 4.0, 9.0];
        let x = project_box_simplex(&[5.0, 1.0, -3.0], &caps, 6.0);
        let sum: f64 = x.iter().sum();
        assert!((sum - 6.0).abs() < 1e-9);
        for (v, c) in x.iter().zip(&caps) {
            assert!(*v >= -1e-12 && v <= c);
        }
    }

    #[test]
    fn projection_saturates_extremes() {
        let caps = [2.0, 3.0];
        assert_eq!(project_box_simplex(&[1.0, 1.0], &caps, 5.0), vec![2.0, 3.0]);
        assert_eq!(project_box_simplex(&[1.0, 1.0], &caps, 0.0), vec![0.0, 0.0]);
    }

    #[test]
    fn float_best_response_matches_exact() {
        let net = ParallelNetwork::from_ints(&[2, 4, 9, 12, 20]);
        let route = FlowProfile::from_ints(&[1, 1, 5, 10, 8]);
        let caps = to_f64_vec(net.capacities());
        let flows = to_f64_vec(route.flows());
        let (value, attack) = best_response_f64(&caps, &flows, 20.0);
        assert!((value - 14.0).abs() < 1e-9);
        let spent: f64 = attack.iter().sum();
        assert!((spent - 20.0).abs() < 1e-9);
        assert!((blocked_f64(&caps, &flows, &attack) - 14.0).abs() < 1e-9);
    }

    #[test]
    fn exact_waterfill_two_attacks_certifies_equalized_value() {
        // Two-link intermediate case: the two canonical attacks mixed evenly
        // certify the closed-form value (r + ra - c2)/2.
        let net = ParallelNetwork::from_ints(&[3, 6]);
        let demand = rat(5);
        let a1 = FlowProfile::from_ints(&[3, 2]);
        let a2 = FlowProfile::from_ints(&[0, 5]);
        let half = frac(1, 2);
        let lb = min_weighted_blocked_exact(
            &net,
            &demand,
            &[(a1, half.clone(), rat(0)), (a2, half, rat(0))],
        );
        assert_eq!(lb, rat(2)); // (5 + 5 - 6) / 2
    }

    #[test]
    fn snap_recovers_simple_routes() {
        let net = ParallelNetwork::from_ints(&[3, 6]);
        let snapped = snap_profile_with_denominator(
            &net,
            &rat(5),
            &[2.0000000001, 2.9999999999],
            &BigInt::from(2),
        )
        .unwrap();
        assert_eq!(snapped.flows(), &[rat(2), rat(3)]);
    }
}
