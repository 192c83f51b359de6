//! Reproducible simulation benchmarks comparing the base estimator with the
//! best symmetric estimator.

pub mod config;
pub mod experiment;
pub mod report;
pub mod scenario;

pub use config::{Averaging, ScenarioConfig};
pub use experiment::{
    cover_for, ols_slope, run_experiment, run_experiment_with, wald, Aggregate, EstimatorKind, RiskReport, RiskRow,
    SelectedGroup, SlopeFit,
};
pub use report::{
    aggregates_csv, emit_report, risk_svg, rows_csv, selections_csv, AGGREGATES_HEADER, ROWS_HEADER, SELECTIONS_HEADER,
};
pub use scenario::{estimate_risk, scenario_function, Scenario, ScenarioId};
