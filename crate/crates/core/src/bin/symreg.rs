use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use symreg::bench::{emit_report, run_experiment, EstimatorKind, RiskReport, ScenarioConfig};
use symreg::oracles::{reports_csv, run_all, OracleSuite};
use symreg::selection::{global_ems, split_dataset, BandwidthRule, SelectionInput, SymmetriserMode};
use symreg::{
    delta_cover, delta_schedule, derive_rng, estimators::Dataset, CovariateSpace, ParentGroup, Point, SymError,
};

#[derive(Parser)]
#[command(name = "symreg", version, about = "Symmetry-adaptive nonparametric regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run risk-decay experiments and write CSV and SVG output.
    Simulate(SimulateArgs),
    /// Select a symmetry subgroup for a CSV of `x1..xd,y` rows.
    Select(SelectArgs),
    /// Run the oracle suite; exits 1 if any oracle fails.
    Validate(ValidateArgs),
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// `key = value` config file.
    config: Option<PathBuf>,
    /// Scenario name, or a comma-separated list.
    #[arg(long)]
    scenario: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed cover resolution, or `auto`.
    #[arg(long)]
    delta: Option<String>,
    /// Fit and select on the same dataset.
    #[arg(long)]
    no_split: bool,
    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long, default_value = "symreg-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AveragingArg {
    Grid,
    Mc,
}

#[derive(clap::Args)]
struct SelectArgs {
    csv: PathBuf,
    /// `ball3`, `sphere2`, `torus<d>` or `box(a,b,..)`; defaults to `ball3`
    /// for three covariates and the torus otherwise.
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mc")]
    averaging: AveragingArg,
}

#[derive(clap::Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tenfold smaller sample counts, except for the heavy-tailed moment checks.
    #[arg(long)]
    quick: bool,
}

enum Failure {
    Validation,
    Setup(SymError),
}

impl From<SymError> for Failure {
    fn from(e: SymError) -> Self {
        Failure::Setup(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> SymError {
    SymError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

fn config_err(field: &str, reason: impl Into<String>) -> SymError {
    SymError::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let mut base = match &args.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(v) = &args.n_grid {
        base.set("n_grid", v)?;
    }
    if let Some(v) = args.trials {
        base.trials = v;
    }
    if let Some(v) = args.seed {
        base.seed = v;
    }
    if let Some(v) = &args.delta {
        base.set("delta", v)?;
    }
    if args.no_split {
        base.split = false;
    }
    for kv in &args.sets {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| config_err("--set", format!("expected KEY=VALUE, got `{kv}`")))?;
        base.set(k.trim(), v.trim())?;
    }
    let scenarios: Vec<String> = match &args.scenario {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => vec![base.scenario.to_string()],
    };
    let mut reports = Vec::new();
    for name in scenarios {
        let mut cfg = base.clone();
        cfg.set("scenario", &name)?;
        cfg.validate()?;
        reports.push(run_experiment(&cfg)?);
    }
    let report = RiskReport::merge(reports);
    for path in emit_report(&report, &args.out)? {
        println!("wrote {}", path.display());
    }
    print_summary(&report);
    Ok(())
}

fn print_summary(report: &RiskReport) {
    for s in &report.slopes {
        println!("slope {} {} {:.4}", s.scenario, s.estimator, s.slope);
    }
    for a in &report.aggregates {
        if a.estimator == EstimatorKind::BestSymmetric {
            if let Some(b) = report.aggregate(&a.scenario, a.n, EstimatorKind::Baseline) {
                println!(
                    "{} n={} baseline={:.5} best_symmetric={:.5}",
                    a.scenario, a.n, b.mean_risk, a.mean_risk
                );
            }
        }
    }
}

fn read_csv(path: &Path, space: Option<&str>) -> Result<Dataset, SymError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(config_err("csv", format!("line {}: non-numeric field", i + 1))),
        }
    }
    let width = rows.first().map(Vec::len).unwrap_or(0);
    if width < 2 {
        return Err(config_err(
            "csv",
            "need at least one covariate column and a response column",
        ));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(config_err(
            "csv",
            format!("row {} has {} fields, expected {width}", i + 1, rows[i].len()),
        ));
    }
    let d = width - 1;
    let space: CovariateSpace = match space {
        Some(s) => s.parse()?,
        None if d == 3 => CovariateSpace::UnitBall3,
        None => CovariateSpace::torus(d)?,
    };
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for r in &rows {
        xs.push(Point::new(&r[..d])?);
        ys.push(r[d]);
    }
    Dataset::new(space, xs, ys)
}

fn select(args: SelectArgs) -> Result<(), Failure> {
    let data = read_csv(&args.csv, args.space.as_deref())?;
    let space = data.space().clone();
    let parent = ParentGroup::for_space(&space);
    let delta = match args.delta {
        Some(d) => d,
        None => delta_schedule(
            data.len(),
            args.beta,
            space.intrinsic_dim(),
            parent.max_orbit_dimension(),
            args.lipschitz,
            1.0,
        )?,
    };
    let cover = delta_cover(parent, &space, delta)?;
    let mut rng = derive_rng(args.seed, &[]);
    let (fit, holdout) = split_dataset(&data, &mut rng)?;
    let mode = match args.averaging {
        AveragingArg::Grid => SymmetriserMode::OrbitGrid,
        AveragingArg::Mc => SymmetriserMode::MonteCarlo {
            draws: None,
            seed: args.seed,
        },
    };
    let input = SelectionInput::new(&fit, &holdout, &cover)
        .with_rule(BandwidthRule {
            a: args.a,
            beta: args.beta,
        })
        .with_mode(mode)
        .with_fallback_error(args.lipschitz);
    let selection = global_ems(&input)?;
    println!("space: {space}");
    println!("n: {} (fit {}, holdout {})", data.len(), fit.len(), holdout.len());
    println!("delta: {delta}");
    println!("candidates: {}", cover.len());
    print!("{}", selection.report());
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let mut suite = OracleSuite {
        seed: args.seed,
        ..OracleSuite::default()
    };
    if args.quick {
        suite.lipschitz_samples /= 10;
        suite.packing_configs /= 10;
        suite.bias_samples /= 10;
        suite.tail_trials /= 10;
    }
    let reports = run_all(&suite)?;
    let csv = reports_csv(&reports);
    match &args.out {
        Some(p) => fs::write(p, &csv).map_err(|e| io_err(p, e))?,
        None => print!("{csv}"),
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        eprintln!("all {} oracles passed", reports.len());
        Ok(())
    } else {
        eprintln!("failed oracles: {}", failed.join(", "));
        Err(Failure::Validation)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Select(a) => select(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Setup(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
