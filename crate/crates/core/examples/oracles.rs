//! Running the oracle checks with small sample counts.

use symreg::oracles::{run_all, OracleSuite};

fn main() -> symreg::Result<()> {
    let suite = OracleSuite {
        lipschitz_samples: 10_000,
        packing_configs: 200,
        bias_samples: 200,
        tail_trials: 10_000,
        ..OracleSuite::default()
    };
    for r in run_all(&suite)? {
        println!(
            "{:<5} {:<34} observed {:.5} expected {:.5} tol {:.5}",
            if r.pass { "pass" } else { "FAIL" },
            r.name,
            r.observed,
            r.expected,
            r.tolerance
        );
    }
    Ok(())
}
