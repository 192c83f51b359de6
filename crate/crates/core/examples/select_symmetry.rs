//! Selecting a subgroup by held-out error, then predicting with it.

use rand::SeedableRng;
use symreg::bench::{Scenario, ScenarioId};
use symreg::selection::{
    best_symmetric, global_ems, ranked, split_dataset, BandwidthRule, SelectionInput, SymmetriserMode,
};
use symreg::{delta_cover, ParentGroup, Point, SimRng};

fn main() -> symreg::Result<()> {
    let scenario = Scenario::builtin(ScenarioId::T2G3)?;
    let mut rng = SimRng::seed_from_u64(11);
    let data = scenario.generate_data(0.3, 600, &mut rng)?;
    let (fit, holdout) = split_dataset(&data, &mut rng)?;
    let cover = delta_cover(ParentGroup::Torus { dim: 2 }, data.space(), 0.5)?;
    let mode = SymmetriserMode::MonteCarlo { draws: None, seed: 3 };
    let input = SelectionInput::new(&fit, &holdout, &cover).with_mode(mode);
    let selection = global_ems(&input)?;
    println!("chosen: {}", selection.chosen);
    for (g, e) in ranked(&selection).iter().take(4) {
        println!("  {e:.5}  {g}");
    }
    let pred = best_symmetric(&fit, &selection, BandwidthRule::default(), mode)?;
    let x = Point::xy(0.3, 0.1);
    println!(
        "prediction at {:?}: {:.4} (truth {:.4})",
        x.coords(),
        pred.predict(&x),
        scenario.eval(&x)
    );
    Ok(())
}
