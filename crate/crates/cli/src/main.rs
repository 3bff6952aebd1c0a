//! Command-line front end for the parallel-network routing game solvers.

mod doc;
mod output;
mod parallel;
mod svg;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use routegame::rational::to_f64;
use routegame::{
    best_response, best_response_curve, blocked, candidate_budgets, classify_regime,
    full_block_level, knapsack_dp, risk, solve_knapsack_via_attack, solve_stackelberg,
    stackelberg_value, value_of_information, zero_block_threshold, Error, GameInstance,
    KnapsackInstance, PiecewiseLinearCurve, Rational, Regime, SolverOptions, VoiOptions,
};

use doc::Instance;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
    pub fn parse(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }
    pub fn domain(message: impl Into<String>) -> Self {
        CliError::new(3, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => 2,
            Error::Domain(_) | Error::Shape { .. } | Error::Index { .. } => 3,
            Error::TooLarge { .. } => 4,
            Error::Internal(_) => 1,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(1, e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "routegame",
    about = "Solvers for adversarial flooding games on parallel networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SolverFlags {
    /// Certificate gap below which the numerical solvers stop.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration budget for the numerical solvers.
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Seed for randomized solver restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverFlags {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate blocked traffic for a route/attack pair.
    Block {
        file: PathBuf,
        /// Comma-separated route overriding the document's "route".
        #[arg(long)]
        route: Option<String>,
        /// Comma-separated attack overriding the document's "attack".
        #[arg(long)]
        attack: Option<String>,
    },
    /// Compute an exact best-response attack against the document's route.
    BestResponse {
        file: PathBuf,
        #[arg(long)]
        route: Option<String>,
    },
    /// Report the zero-block and full-block thresholds for the demand.
    Thresholds { file: PathBuf },
    /// Classify the instance's equilibrium regime.
    Classify { file: PathBuf },
    /// Sweep a (r, r_a) grid and emit `r,ra,regime` CSV rows.
    Regions {
        file: PathBuf,
        #[arg(long)]
        r_max: String,
        #[arg(long)]
        ra_max: String,
        #[arg(long)]
        step: String,
        /// Also write a colored regime map.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve for a Stackelberg route (exact in the regimes and on two links).
    Se {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Emit the Stackelberg value curve (and the route's best-response curve
    /// when a route is given) as `ra,value[,b_star]` CSV rows.
    Curve {
        file: PathBuf,
        /// Upper end of the budget axis; defaults to the total capacity.
        #[arg(long)]
        ra_max: Option<String>,
        #[arg(long, default_value_t = 33)]
        samples: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Risk of committing to the document's route over a budget interval.
    Risk {
        file: PathBuf,
        /// Also write the per-candidate table as `ra,b_star,b_se,diff` CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Value of information for a budget interval.
    Voi {
        file: PathBuf,
        /// Use the numerical path even on two-link networks.
        #[arg(long)]
        force_numerical: bool,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Solve a 0-1 knapsack document, by reduction and/or dynamic program.
    Kp {
        file: PathBuf,
        /// Only the attack-reduction path.
        #[arg(long)]
        via_attack: bool,
        /// Only the dynamic-programming path.
        #[arg(long)]
        dp: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly when a pager closes the pipe instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Block {
            file,
            route,
            attack,
        } => {
            let instance = Instance::load(&file)?;
            let route = match route {
                Some(text) => doc::parse_flag_profile(&text)?,
                None => instance.route()?.clone(),
            };
            let attack = match attack {
                Some(text) => doc::parse_flag_profile(&text)?,
                None => instance.attack()?.clone(),
            };
            let report = blocked(&instance.network, &route, &attack)?;
            output::print(&json!({
                "per_edge": report.per_edge.iter().map(output::num).collect::<Vec<_>>(),
                "total": output::num(&report.total),
            }));
            Ok(0)
        }
        Command::BestResponse { file, route } => {
            let instance = Instance::load(&file)?;
            let route = match route {
                Some(text) => doc::parse_flag_profile(&text)?,
                None => instance.route()?.clone(),
            };
            let result = best_response(&instance.network, &route, instance.budget()?)?;
            output::print(&output::best_response(&result));
            Ok(0)
        }
        Command::Thresholds { file } => {
            let instance = Instance::load(&file)?;
            let demand = instance.demand()?;
            let g = zero_block_threshold(&instance.network, demand)?;
            let h = full_block_level(&instance.network, demand)?;
            let cap = instance.network.total_capacity();
            output::print(&json!({
                "zero_block_threshold": output::num(&g.value),
                "zero_block_argmax": g.argmax.iter().copied().collect::<Vec<_>>(),
                "full_block_level": output::num(&h.value),
                "full_block_argmax": h.argmax.iter().copied().collect::<Vec<_>>(),
                "full_block_threshold": output::num(&(&cap - &h.value)),
                "total_capacity": output::num(&cap),
            }));
            Ok(0)
        }
        Command::Classify { file } => {
            let instance = Instance::load(&file)?;
            let game = GameInstance::new(
                instance.network.clone(),
                instance.demand()?.clone(),
                instance.budget()?.clone(),
            )?;
            let report = classify_regime(&game)?;
            output::print(&output::regime_report(&report));
            Ok(0)
        }
        Command::Regions {
            file,
            r_max,
            ra_max,
            step,
            svg,
        } => run_regions(&file, &r_max, &ra_max, &step, svg.as_deref()),
        Command::Se { file, solver } => {
            let instance = Instance::load(&file)?;
            let game = GameInstance::new(
                instance.network.clone(),
                instance.demand()?.clone(),
                instance.budget()?.clone(),
            )?;
            let result = solve_stackelberg(&game, &solver.options())?;
            output::print(&output::stackelberg(&result));
            Ok(if result.converged { 0 } else { 5 })
        }
        Command::Curve {
            file,
            ra_max,
            samples,
            svg,
            solver,
        } => run_curve(&file, ra_max.as_deref(), samples, svg.as_deref(), &solver),
        Command::Risk { file, csv, solver } => {
            let instance = Instance::load(&file)?;
            let result = risk(
                &instance.network,
                instance.demand()?,
                instance.route()?,
                instance.interval()?,
                &solver.options(),
            )?;
            if let Some(path) = csv {
                let mut text = String::from("ra,b_star,b_se,diff\n");
                for p in &result.points {
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        p.budget, p.best_response, p.stackelberg, p.regret
                    ));
                }
                std::fs::write(path, text)?;
            }
            output::print(&output::risk_result(&result));
            let converged = result
                .points
                .iter()
                .all(|p| p.stackelberg_gap <= routegame::rational::from_f64_exact(solver.tol));
            Ok(if converged { 0 } else { 5 })
        }
        Command::Voi {
            file,
            force_numerical,
            solver,
        } => {
            let instance = Instance::load(&file)?;
            let options = VoiOptions {
                solver: solver.options(),
                force_numerical,
            };
            let result = value_of_information(
                &instance.network,
                instance.demand()?,
                instance.interval()?,
                &options,
            )?;
            output::print(&output::voi_result(&result));
            Ok(if result.converged { 0 } else { 5 })
        }
        Command::Kp {
            file,
            via_attack,
            dp,
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CliError::parse(format!("cannot read {}: {e}", file.display())))?;
            let kp = KnapsackInstance::from_json(&text)?;
            let run_attack = via_attack || !dp;
            let run_dp = dp || !via_attack;
            let mut out = serde_json::Map::new();
            let mut values: Vec<Rational> = Vec::new();
            if run_attack {
                let solution = solve_knapsack_via_attack(&kp)?;
                out.insert(
                    "via_attack".into(),
                    json!({
                        "value": output::num(&solution.value),
                        "selection": solution.selection.iter().copied().collect::<Vec<_>>(),
                    }),
                );
                values.push(solution.value);
            }
            if run_dp {
                let value = knapsack_dp(&kp)?;
                out.insert("dp".into(), json!({ "value": output::num(&value) }));
                values.push(value);
            }
            if values.len() == 2 {
                out.insert("agree".into(), json!(values[0] == values[1]));
            }
            output::print(&serde_json::Value::Object(out));
            Ok(0)
        }
    }
}

fn run_regions(
    file: &std::path::Path,
    r_max: &str,
    ra_max: &str,
    step: &str,
    svg_path: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let instance = Instance::load(file)?;
    let network = instance.network;
    let r_max = doc::parse_flag_rational(r_max, "--r-max")?;
    let ra_max = doc::parse_flag_rational(ra_max, "--ra-max")?;
    let step = doc::parse_flag_rational(step, "--step")?;
    if !num_positive(&step) {
        return Err(CliError::domain("--step must be positive"));
    }
    let cap = network.total_capacity();
    let clip = |limit: &Rational| {
        if limit < &cap {
            limit.clone()
        } else {
            cap.clone()
        }
    };
    let (r_top, ra_top) = (clip(&r_max), clip(&ra_max));

    let mut demands = Vec::new();
    let mut r = Rational::from_integer(0.into());
    while r <= r_top {
        demands.push(r.clone());
        r += &step;
    }
    // Rows are independent; fan out and merge in order.
    let rows = parallel::map_ordered(demands, parallel::thread_count(), |demand| {
        let g = zero_block_threshold(&network, &demand)?.value;
        let threshold = &cap - full_block_level(&network, &demand)?.value;
        let mut row = Vec::new();
        let mut budget = Rational::from_integer(0.into());
        while budget <= ra_top {
            let regime = if budget <= g {
                Regime::ZeroBlockNe
            } else if budget >= threshold {
                Regime::FullBlockNe
            } else {
                Regime::NoNe
            };
            row.push((demand.clone(), budget.clone(), regime));
            budget += &step;
        }
        Ok::<_, Error>(row)
    });

    let mut cells = Vec::new();
    for row in rows {
        cells.extend(row?);
    }
    println!("r,ra,regime");
    for (demand, budget, regime) in &cells {
        println!("{demand},{budget},{}", regime.as_str());
    }
    if let Some(path) = svg_path {
        let colored: Vec<(f64, f64, &'static str)> = cells
            .iter()
            .map(|(demand, budget, regime)| {
                let color = match regime {
                    Regime::ZeroBlockNe => "#7fbf7f",
                    Regime::FullBlockNe => "#7f9fd0",
                    Regime::NoNe => "#9a9a9a",
                };
                (to_f64(demand), to_f64(budget), color)
            })
            .collect();
        svg::grid_chart(
            path,
            "demand r",
            "attack budget ra",
            &colored,
            to_f64(&step),
            &[
                ("zero_block_ne", "#7fbf7f"),
                ("full_block_ne", "#7f9fd0"),
                ("no_ne", "#9a9a9a"),
            ],
        )?;
    }
    Ok(0)
}

fn run_curve(
    file: &std::path::Path,
    ra_max: Option<&str>,
    samples: usize,
    svg_path: Option<&std::path::Path>,
    solver: &SolverFlags,
) -> Result<u8, CliError> {
    let instance = Instance::load(file)?;
    let network = instance.network.clone();
    let demand = instance.demand()?.clone();
    if samples < 2 {
        return Err(CliError::domain("--samples must be at least 2"));
    }
    let cap = network.total_capacity();
    let budget_max = match ra_max {
        Some(text) => doc::parse_flag_rational(text, "--ra-max")?,
        None => cap.clone(),
    };
    if budget_max > cap || !num_nonnegative(&budget_max) {
        return Err(CliError::domain(format!("--ra-max must lie in [0, {cap}]")));
    }

    // Sample at subset sums, regime thresholds and a uniform grid.
    let mut xs: BTreeSet<Rational> = BTreeSet::new();
    xs.insert(Rational::from_integer(0.into()));
    xs.insert(budget_max.clone());
    for sum in candidate_budgets(&network)? {
        if sum <= budget_max {
            xs.insert(sum);
        }
    }
    let g = zero_block_threshold(&network, &demand)?.value;
    if num_positive(&g) && g <= budget_max {
        xs.insert(g);
    }
    let full = &cap - full_block_level(&network, &demand)?.value;
    if num_positive(&full) && full <= budget_max {
        xs.insert(full);
    }
    if num_positive(&budget_max) {
        for i in 1..samples {
            xs.insert(
                &budget_max * Rational::new((i as i64).into(), ((samples - 1) as i64).into()),
            );
        }
    }
    let xs: Vec<Rational> = xs.into_iter().collect();

    let options = solver.options();
    let evaluated = parallel::map_ordered(xs, parallel::thread_count(), |x| {
        let se = stackelberg_value(&network, &demand, &x, &options)?;
        Ok::<_, Error>((x, se.value, se.certificate.gap))
    });
    let mut points = Vec::new();
    let mut all_converged = true;
    for entry in evaluated {
        let (x, value, gap) = entry?;
        if gap > routegame::rational::from_f64_exact(solver.tol) {
            all_converged = false;
        }
        points.push((x, value));
    }

    let route_curve: Option<PiecewiseLinearCurve> = match &instance.route {
        Some(route) => Some(best_response_curve(&network, route, &budget_max)?),
        None => None,
    };

    match &route_curve {
        Some(curve) => {
            println!("ra,value,b_star");
            for (x, value) in &points {
                println!("{x},{value},{}", curve.value_at(x)?);
            }
        }
        None => {
            println!("ra,value");
            for (x, value) in &points {
                println!("{x},{value}");
            }
        }
    }

    if let Some(path) = svg_path {
        let mut series = vec![svg::Series {
            label: "stackelberg".into(),
            color: "#e07020",
            points: points.iter().map(|(x, v)| (to_f64(x), to_f64(v))).collect(),
        }];
        if let Some(curve) = &route_curve {
            series.push(svg::Series {
                label: "best response".into(),
                color: "#808080",
                points: curve
                    .breakpoints()
                    .iter()
                    .map(|(x, v)| (to_f64(x), to_f64(v)))
                    .collect(),
            });
        }
        svg::line_chart(path, "attack budget ra", "blocked traffic", &series)?;
    }
    Ok(if all_converged { 0 } else { 5 })
}

fn num_positive(x: &Rational) -> bool {
    x > &Rational::from_integer(0.into())
}

fn num_nonnegative(x: &Rational) -> bool {
    x >= &Rational::from_integer(0.into())
}
