//! Symmetry selection restricted to a region of the covariate space.

use rand::SeedableRng;
use symreg::bench::Scenario;
use symreg::selection::{local_ems, split_dataset, SelectionInput, SymmetriserMode};
use symreg::{delta_cover, CovariateSpace, ParentGroup, Point, SimRng};

fn main() -> symreg::Result<()> {
    let torus = CovariateSpace::torus(2)?;
    // left half depends on x1 only; right half depends on x2, and x1-orbits leave it
    let scenario = Scenario::custom("halves", torus.clone(), |x: &Point| {
        let c = x.coords();
        if c[0] < 0.5 {
            (std::f64::consts::TAU * c[0]).sin()
        } else {
            (std::f64::consts::TAU * c[1]).cos()
        }
    });
    let mut rng = SimRng::seed_from_u64(5);
    let data = scenario.generate_data(0.2, 800, &mut rng)?;
    let (fit, holdout) = split_dataset(&data, &mut rng)?;
    let cover = delta_cover(ParentGroup::Torus { dim: 2 }, &torus, 0.5)?;
    let mode = SymmetriserMode::MonteCarlo { draws: None, seed: 1 };
    let left = |x: &Point| x.coords()[0] > 0.1 && x.coords()[0] < 0.4;
    let right = |x: &Point| x.coords()[0] > 0.6 && x.coords()[0] < 0.9;
    for (name, region) in [("left", &left as &(dyn Fn(&Point) -> bool + Sync)), ("right", &right)] {
        let input = SelectionInput::new(&fit, &holdout, &cover)
            .with_region(region)
            .with_mode(mode);
        let s = local_ems(&input)?;
        println!("{name}: chosen {} (fallback {})", s.chosen, s.used_fallback);
    }
    Ok(())
}
