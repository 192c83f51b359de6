//! A small risk-decay experiment written to CSV and SVG.

use symreg::bench::{emit_report, run_experiment, EstimatorKind, ScenarioConfig};

fn main() -> symreg::Result<()> {
    let cfg = ScenarioConfig::parse("scenario = t2_g2\nn_grid = 30,60,120\ntrials = 5\ndelta = 0.5\nseed = 1\n")?;
    let report = run_experiment(&cfg)?;
    for a in &report.aggregates {
        println!(
            "n = {:>3} {:<14} {:.5} ± {:.5}",
            a.n, a.estimator, a.mean_risk, a.ci_halfwidth
        );
    }
    for e in EstimatorKind::ALL {
        if let Some(s) = report.slope("t2_g2", e) {
            println!("{e} slope {s:.3}");
        }
    }
    let dir = std::env::temp_dir().join("symreg-example");
    for p in emit_report(&report, &dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
