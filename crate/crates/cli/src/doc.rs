//! Instance documents: the JSON input format shared by all subcommands.

use serde::Deserialize;

use routegame::rational::parse_rational;
use routegame::{BudgetInterval, FlowProfile, ParallelNetwork, Rational};

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub capacities: Vec<String>,
    #[serde(default)]
    pub r: Option<String>,
    #[serde(default)]
    pub r_a: Option<BudgetField>,
    #[serde(default)]
    pub route: Option<Vec<String>>,
    #[serde(default)]
    pub attack: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum BudgetField {
    Scalar(String),
    Interval { lo: String, hi: String },
}

fn parse_field(value: &str, field: &str) -> Result<Rational, CliError> {
    parse_rational(value).map_err(|e| CliError::parse(format!("field {field:?}: {e}")))
}

fn parse_list(values: &[String], field: &str) -> Result<Vec<Rational>, CliError> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| parse_field(v, &format!("{field}[{i}]")))
        .collect()
}

pub struct Instance {
    pub network: ParallelNetwork,
    pub demand: Option<Rational>,
    pub budget: Option<Rational>,
    pub interval: Option<BudgetInterval>,
    pub route: Option<FlowProfile>,
    pub attack: Option<FlowProfile>,
}

impl Instance {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        let doc: InstanceDoc = serde_json::from_str(&text)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let network = ParallelNetwork::new(parse_list(&doc.capacities, "capacities")?)?;
        let demand = doc.r.as_deref().map(|v| parse_field(v, "r")).transpose()?;
        let (budget, interval) = match &doc.r_a {
            None => (None, None),
            Some(BudgetField::Scalar(v)) => (Some(parse_field(v, "r_a")?), None),
            Some(BudgetField::Interval { lo, hi }) => {
                let lo = parse_field(lo, "r_a.lo")?;
                let hi = parse_field(hi, "r_a.hi")?;
                (None, Some(BudgetInterval::new(lo, hi)?))
            }
        };
        let route = doc
            .route
            .as_deref()
            .map(|v| FlowProfile::new(parse_list(v, "route")?).map_err(CliError::from))
            .transpose()?;
        let attack = doc
            .attack
            .as_deref()
            .map(|v| FlowProfile::new(parse_list(v, "attack")?).map_err(CliError::from))
            .transpose()?;
        Ok(Instance {
            network,
            demand,
            budget,
            interval,
            route,
            attack,
        })
    }

    pub fn demand(&self) -> Result<&Rational, CliError> {
        self.demand
            .as_ref()
            .ok_or_else(|| CliError::domain("this command needs the \"r\" field"))
    }

    pub fn budget(&self) -> Result<&Rational, CliError> {
        self.budget
            .as_ref()
            .ok_or_else(|| CliError::domain("this command needs a scalar \"r_a\" field"))
    }

    pub fn interval(&self) -> Result<&BudgetInterval, CliError> {
        self.interval.as_ref().ok_or_else(|| {
            CliError::domain("this command needs \"r_a\" as an interval {\"lo\",\"hi\"}")
        })
    }

    pub fn route(&self) -> Result<&FlowProfile, CliError> {
        self.route
            .as_ref()
            .ok_or_else(|| CliError::domain("this command needs the \"route\" field"))
    }

    pub fn attack(&self) -> Result<&FlowProfile, CliError> {
        self.attack
            .as_ref()
            .ok_or_else(|| CliError::domain("this command needs the \"attack\" field"))
    }
}

/// Parses a comma-separated list of rationals from a command-line flag.
pub fn parse_flag_profile(text: &str) -> Result<FlowProfile, CliError> {
    let flows = text
        .split(',')
        .map(|part| parse_rational(part).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FlowProfile::new(flows)?)
}

pub fn parse_flag_rational(text: &str, flag: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::parse(format!("flag {flag}: {e}")))
}
