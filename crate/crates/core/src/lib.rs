//! Solvers for a two-player zero-sum flooding game on parallel networks.
//!
//! A router splits `r` units of legitimate traffic across parallel edges
//! with capacities `c`; an attacker floods the edges with `r^a` units of
//! junk, and traffic beyond capacity is dropped. The crate provides:
//!
//! - exact evaluation of blocked traffic and feasibility ([`model`]);
//! - exact best-response attacks via saturated-set enumeration, together
//!   with independent lattice and pseudo-polynomial oracles ([`attacker`]);
//! - the constructive equivalence with 0-1 knapsack ([`hardness`]);
//! - regime thresholds deciding when no-regret outcomes exist, the
//!   closed-form routes realizing them, and Nash verification
//!   ([`equilibria`]);
//! - Stackelberg routing with exact two-link closed forms and a certified
//!   numerical solver for intermediate budgets ([`stackelberg`]);
//! - risk and value-of-information under budget uncertainty ([`valueinfo`]).
//!
//! All core quantities are exact rationals; the numerical solvers iterate in
//! floats but snap and re-certify their answers exactly.

pub mod attacker;
pub mod curve;
pub mod equilibria;
pub mod error;
pub mod hardness;
pub mod model;
mod numeric;
pub mod rational;
pub mod stackelberg;
pub mod valueinfo;

pub use attacker::{
    best_response, best_response_curve, best_response_dp, candidate_budgets, lattice_best_response,
    AttackStructure, BestResponseResult,
};
pub use curve::PiecewiseLinearCurve;
pub use equilibria::{
    classify_regime, full_block_level, regime_map, route_for_high_budget, route_for_low_budget,
    verify_nash, zero_block_threshold, Regime, RegimeCell, RegimeReport, Threshold,
};
pub use error::{Error, Result};
pub use hardness::{
    all_or_nothing_bound, knapsack_dp, knapsack_to_attack, min_overshoot,
    solve_knapsack_via_attack, KnapsackInstance, KnapsackItem, KnapsackReduction, KnapsackSolution,
    ReducedAttack,
};
pub use model::{
    blocked, is_feasible_profile, BlockReport, FlowProfile, GameInstance, ParallelNetwork,
};
pub use rational::{parse_rational, Rational};
pub use stackelberg::{
    solve_stackelberg, stackelberg_curve, stackelberg_value, two_link_best_response,
    two_link_stackelberg, Certificate, SolverOptions, StackelbergResult,
};
pub use valueinfo::{
    risk, two_link_regret, two_link_value_of_information, value_of_information, BudgetInterval,
    RiskPoint, RiskResult, TwoLinkVoi, VoiOptions, VoiResult,
};
