//! The simulation loop: fit, select, symmetrise and score, per sample size and trial.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::bench::config::{Averaging, ScenarioConfig};
use crate::bench::scenario::Scenario;
use crate::error::Result;
use crate::estimators::{bandwidth, Lce, LceConfig, Predictor};
use crate::sampling::{derive_rng, label, sample_point, Distribution};
use crate::selection::{best_symmetric, global_ems, BandwidthRule, SelectionInput, SymmetriserMode};
use crate::space::Point;
use crate::subgroups::{delta_cover, delta_schedule, ClosedSubgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EstimatorKind {
    Baseline,
    BestSymmetric,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 2] = [EstimatorKind::Baseline, EstimatorKind::BestSymmetric];
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Baseline => "baseline",
            EstimatorKind::BestSymmetric => "best_symmetric",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub scenario: String,
    pub n: usize,
    pub trial: usize,
    pub estimator: EstimatorKind,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub scenario: String,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub mean_risk: f64,
    /// `1.96 · sd / √trials`, with the sample (n − 1) standard deviation.
    pub ci_halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub scenario: String,
    pub estimator: EstimatorKind,
    /// OLS slope of `ln(mean risk)` on `ln n`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedGroup {
    pub scenario: String,
    pub n: usize,
    pub trial: usize,
    pub chosen: ClosedSubgroup,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskReport {
    pub rows: Vec<RiskRow>,
    pub aggregates: Vec<Aggregate>,
    pub slopes: Vec<SlopeFit>,
    pub selections: Vec<SelectedGroup>,
}

/// OLS slope of `y` on `x`; `None` with fewer than two distinct `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

/// Mean and 95% Wald half-width of a sample.
pub fn wald(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, 1.96 * var.sqrt() / k.sqrt())
}

impl RiskReport {
    /// Builds aggregates and slopes from rows. Scenarios keep their order of
    /// first appearance; within one, aggregates run by `n`, baseline first.
    pub fn from_rows(rows: Vec<RiskRow>, selections: Vec<SelectedGroup>) -> RiskReport {
        let mut scenarios: Vec<String> = Vec::new();
        for r in &rows {
            if !scenarios.contains(&r.scenario) {
                scenarios.push(r.scenario.clone());
            }
        }
        let mut aggregates = Vec::new();
        let mut slopes = Vec::new();
        for s in &scenarios {
            let mut ns: Vec<usize> = rows.iter().filter(|r| &r.scenario == s).map(|r| r.n).collect();
            ns.sort_unstable();
            ns.dedup();
            for n in &ns {
                for est in EstimatorKind::ALL {
                    let vals: Vec<f64> = rows
                        .iter()
                        .filter(|r| &r.scenario == s && r.n == *n && r.estimator == est)
                        .map(|r| r.risk)
                        .collect();
                    if vals.is_empty() {
                        continue;
                    }
                    let (mean_risk, ci_halfwidth) = wald(&vals);
                    aggregates.push(Aggregate {
                        scenario: s.clone(),
                        n: *n,
                        estimator: est,
                        mean_risk,
                        ci_halfwidth,
                    });
                }
            }
            for est in EstimatorKind::ALL {
                let pts: Vec<(f64, f64)> = aggregates
                    .iter()
                    .filter(|a| &a.scenario == s && a.estimator == est && a.mean_risk > 0.0)
                    .map(|a| ((a.n as f64).ln(), a.mean_risk.ln()))
                    .collect();
                let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                if let Some(slope) = ols_slope(&x, &y) {
                    slopes.push(SlopeFit {
                        scenario: s.clone(),
                        estimator: est,
                        slope,
                    });
                }
            }
        }
        RiskReport {
            rows,
            aggregates,
            slopes,
            selections,
        }
    }

    pub fn merge(reports: Vec<RiskReport>) -> RiskReport {
        let mut rows = Vec::new();
        let mut selections = Vec::new();
        for r in reports {
            rows.extend(r.rows);
            selections.extend(r.selections);
        }
        RiskReport::from_rows(rows, selections)
    }

    pub fn aggregate(&self, scenario: &str, n: usize, estimator: EstimatorKind) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.scenario == scenario && a.n == n && a.estimator == estimator)
    }

    pub fn slope(&self, scenario: &str, estimator: EstimatorKind) -> Option<f64> {
        self.slopes
            .iter()
            .find(|s| s.scenario == scenario && s.estimator == estimator)
            .map(|s| s.slope)
    }

    /// Slope restricted to `lo ≤ n ≤ hi`.
    pub fn slope_between(&self, scenario: &str, estimator: EstimatorKind, lo: usize, hi: usize) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .aggregates
            .iter()
            .filter(|a| a.scenario == scenario && a.estimator == estimator)
            .filter(|a| a.n >= lo && a.n <= hi && a.mean_risk > 0.0)
            .map(|a| ((a.n as f64).ln(), a.mean_risk.ln()))
            .unzip();
        ols_slope(&x, &y)
    }
}

/// The candidate cover used at sample size `n`.
pub fn cover_for(scenario: &Scenario, cfg: &ScenarioConfig, n: usize) -> Result<Vec<ClosedSubgroup>> {
    let delta = match cfg.delta {
        Some(d) => d,
        None => delta_schedule(
            n,
            cfg.beta,
            scenario.space.intrinsic_dim(),
            scenario.parent.max_orbit_dimension(),
            cfg.lipschitz,
            cfg.group_lipschitz,
        )?,
    };
    delta_cover(scenario.parent, &scenario.space, delta)
}

struct TrialOutcome {
    baseline: f64,
    symmetric: f64,
    chosen: ClosedSubgroup,
}

fn run_trial(
    scenario: &Scenario,
    cfg: &ScenarioConfig,
    cover: &[ClosedSubgroup],
    n: usize,
    trial: usize,
) -> Result<TrialOutcome> {
    let key = [label(&scenario.id.to_string()), n as u64, trial as u64];
    let stream = |name: &str| {
        let mut labels = key.to_vec();
        labels.push(label(name));
        derive_rng(cfg.seed, &labels)
    };
    let space = &scenario.space;
    let d = space.intrinsic_dim();
    let rule = BandwidthRule {
        a: cfg.a,
        beta: cfg.beta,
    };

    let mut data_rng = stream("data");
    let (fit, select, union) = if cfg.split {
        let fit = scenario.generate_data(cfg.noise_sd, n, &mut data_rng)?;
        let select = scenario.generate_data(cfg.noise_sd, n, &mut data_rng)?;
        let union = fit.concat(&select)?;
        (fit, select, union)
    } else {
        let data = scenario.generate_data(cfg.noise_sd, n, &mut data_rng)?;
        (data.clone(), data.clone(), data)
    };

    let baseline = Lce::fit(&union, LceConfig::new(bandwidth(cfg.a, union.len(), cfg.beta, d, 0)?)?);

    let mode = |kind: Averaging, name: &str| match kind {
        Averaging::Grid => SymmetriserMode::OrbitGrid,
        Averaging::MonteCarlo => SymmetriserMode::MonteCarlo {
            draws: None,
            seed: stream(name).random::<u64>(),
        },
    };
    let input = SelectionInput::new(&fit, &select, cover)
        .with_rule(rule)
        .with_fallback_error(cfg.lipschitz)
        .with_mode(mode(cfg.selection_averaging, "select-mc"));
    let selection = global_ems(&input)?;
    let symmetric = best_symmetric(&fit, &selection, rule, mode(cfg.final_averaging, "final-mc"))?;

    let mut eval_rng = stream("eval");
    let points: Vec<Point> = (0..cfg.eval_points)
        .map(|_| sample_point(space, Distribution::UniformSpace, &mut eval_rng))
        .collect::<Result<_>>()?;
    let truth = |x: &Point| scenario.eval(x);
    let risk_of = |pred: &dyn Fn(&Point) -> f64| {
        let sum: f64 = points.iter().map(|x| (pred(x) - truth(x)).powi(2)).sum();
        sum / points.len() as f64
    };
    let baseline_risk = risk_of(&|x: &Point| baseline.predict(x));
    let symmetric_risk = risk_of(&|x: &Point| symmetric.predict(x));
    Ok(TrialOutcome {
        baseline: baseline_risk,
        symmetric: symmetric_risk,
        chosen: selection.chosen,
    })
}

/// Runs every `(n, trial)` of a built-in scenario.
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<RiskReport> {
    let scenario = Scenario::builtin(cfg.scenario.clone())?;
    run_experiment_with(cfg, &scenario)
}

/// Runs every `(n, trial)` of the given scenario. Trials run in parallel;
/// each draws from its own stream keyed by `(seed, scenario, n, trial)`, so
/// the report does not depend on scheduling.
pub fn run_experiment_with(cfg: &ScenarioConfig, scenario: &Scenario) -> Result<RiskReport> {
    cfg.validate()?;
    let covers: Vec<Vec<ClosedSubgroup>> = cfg
        .n_grid
        .iter()
        .map(|n| cover_for(scenario, cfg, *n))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.n_grid.len())
        .flat_map(|i| (0..cfg.trials).map(move |t| (i, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|(i, t)| run_trial(scenario, cfg, &covers[*i], cfg.n_grid[*i], *t))
        .collect::<Result<Vec<_>>>()?;

    let name = scenario.id.to_string();
    let mut rows = Vec::with_capacity(2 * jobs.len());
    let mut selections = Vec::with_capacity(jobs.len());
    for ((i, t), o) in jobs.iter().zip(outcomes) {
        let n = cfg.n_grid[*i];
        for (estimator, risk) in [
            (EstimatorKind::Baseline, o.baseline),
            (EstimatorKind::BestSymmetric, o.symmetric),
        ] {
            rows.push(RiskRow {
                scenario: name.clone(),
                n,
                trial: *t,
                estimator,
                risk,
            });
        }
        selections.push(SelectedGroup {
            scenario: name.clone(),
            n,
            trial: *t,
            chosen: o.chosen,
        });
    }
    Ok(RiskReport::from_rows(rows, selections))
}
