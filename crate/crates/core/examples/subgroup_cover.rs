//! Finite δ-covers of the closed connected subgroups, and Hausdorff distances.

use symreg::subgroups::format_catalog;
use symreg::{
    delta_cover, delta_schedule, hausdorff_u_distance, ClosedSubgroup, CompactNeighborhood, CovariateSpace, ParentGroup,
};

fn main() -> symreg::Result<()> {
    let ball = CovariateSpace::UnitBall3;
    for delta in [0.5, 1.0, 2.0] {
        let cover = delta_cover(ParentGroup::SO3, &ball, delta)?;
        println!("SO(3) cover at delta {delta}: {} subgroups", cover.len());
    }

    let torus = CovariateSpace::torus(2)?;
    let cover = delta_cover(ParentGroup::Torus { dim: 2 }, &torus, 0.5)?;
    print!("torus cover at delta 0.5:\n{}", format_catalog(&cover));

    let z = ClosedSubgroup::circle([0.0, 0.0, 1.0])?;
    let tilted = ClosedSubgroup::circle([0.0, 0.2f64.sin(), 0.2f64.cos()])?;
    let d = hausdorff_u_distance(&z, &tilted, CompactNeighborhood::WholeGroup, 0.01)?;
    println!("Hausdorff distance between circles 0.2 rad apart: {d:.4}");

    let delta_n = delta_schedule(300, 1.0, 3, 2, 1.0, 1.0)?;
    println!("schedule delta at n = 300: {delta_n:.5}");
    Ok(())
}
