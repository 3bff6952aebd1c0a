//! JSON rendering: every numeric carries both the exact rational (string)
//! and a float approximation.

use serde_json::{json, Value};

use routegame::rational::to_f64;
use routegame::{
    AttackStructure, BestResponseResult, Certificate, FlowProfile, Rational, RegimeReport,
    RiskResult, StackelbergResult, VoiResult,
};

pub fn num(r: &Rational) -> Value {
    json!({ "exact": r.to_string(), "approx": to_f64(r) })
}

pub fn profile(p: &FlowProfile) -> Value {
    Value::Array(p.flows().iter().map(num).collect())
}

pub fn structure(s: &AttackStructure) -> Value {
    json!({
        "saturated": s.saturated.iter().copied().collect::<Vec<_>>(),
        "partial": s.partial.as_ref().map(|(edge, amount)| json!({
            "edge": edge,
            "amount": num(amount),
        })),
        "dump": s.dump.iter().map(|(edge, amount)| json!({
            "edge": edge,
            "amount": num(amount),
        })).collect::<Vec<_>>(),
    })
}

pub fn best_response(r: &BestResponseResult) -> Value {
    json!({
        "value": num(&r.value),
        "attack": profile(&r.attack),
        "structure": structure(&r.structure),
    })
}

pub fn certificate(c: &Certificate) -> Value {
    json!({
        "upper": num(&c.upper),
        "lower": num(&c.lower),
        "gap": num(&c.gap),
    })
}

pub fn stackelberg(r: &StackelbergResult) -> Value {
    json!({
        "route": profile(&r.route),
        "value": num(&r.value),
        "certificate": certificate(&r.certificate),
        "converged": r.converged,
        "iterations": r.iterations,
    })
}

pub fn regime_report(r: &RegimeReport) -> Value {
    json!({
        "regime": r.regime.as_str(),
        "zero_block_threshold": num(&r.zero_block_threshold),
        "full_block_level": num(&r.full_block_level),
        "full_block_threshold": num(&r.full_block_threshold),
        "zero_block_holds": r.zero_block_holds,
        "full_block_holds": r.full_block_holds,
    })
}

pub fn risk_result(r: &RiskResult) -> Value {
    json!({
        "risk": num(&r.risk),
        "risk_upper": num(&r.risk_upper),
        "argmax_budget": num(&r.argmax_budget),
        "points": r.points.iter().map(|p| json!({
            "ra": num(&p.budget),
            "b_star": num(&p.best_response),
            "b_se": num(&p.stackelberg),
            "b_se_gap": num(&p.stackelberg_gap),
            "diff": num(&p.regret),
        })).collect::<Vec<_>>(),
    })
}

pub fn voi_result(r: &VoiResult) -> Value {
    json!({
        "value": num(&r.value),
        "value_upper": num(&r.value_upper),
        "lower_bound": num(&r.lower_bound),
        "gap": num(&r.gap),
        "route": profile(&r.route),
        "converged": r.converged,
        "iterations": r.iterations,
    })
}

pub fn print(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}
