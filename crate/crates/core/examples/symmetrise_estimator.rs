//! A local constant estimator and its partial and Monte Carlo symmetrisations.

use rand::SeedableRng;
use symreg::bench::{Scenario, ScenarioId};
use symreg::estimators::{Lce, LceConfig, MonteCarloSymmetriser, PartialSymmetriser, Predictor};
use symreg::{ClosedSubgroup, CompactNeighborhood, Point, SimRng};

fn main() -> symreg::Result<()> {
    let scenario = Scenario::builtin(ScenarioId::So3F2)?;
    let mut rng = SimRng::seed_from_u64(7);
    let data = scenario.generate_data(0.5, 400, &mut rng)?;
    let lce = Lce::fit(&data, LceConfig::new(0.35)?);
    let base = |x: &Point| lce.predict(x);

    let x_axis = ClosedSubgroup::circle([1.0, 0.0, 0.0])?;
    let grid = PartialSymmetriser::new(
        base,
        data.space().clone(),
        x_axis.clone(),
        0.1,
        CompactNeighborhood::WholeGroup,
    )?;
    let mc = MonteCarloSymmetriser::new(base, data.space().clone(), &x_axis, 400, &mut rng)?;

    for x in [Point::xyz(0.2, 0.5, 0.1), Point::xyz(-0.4, 0.0, 0.6)] {
        println!(
            "x = {:?}: truth {:.4}, base {:.4}, grid {:.4}, mc {:.4}",
            x.coords(),
            scenario.eval(&x),
            base(&x),
            grid.predict(&x),
            mc.predict(&x)
        );
    }
    Ok(())
}
