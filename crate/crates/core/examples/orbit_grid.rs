//! Orbit grids: well-spaced group elements along an orbit.

use symreg::{
    build_orbit_grid, hypercube_side, recover_group_element, ClosedSubgroup, CompactNeighborhood, CovariateSpace, Point,
};

fn main() -> symreg::Result<()> {
    let ball = CovariateSpace::UnitBall3;
    let x = Point::xyz(0.6, 0.2, 0.1);
    let u = CompactNeighborhood::WholeGroup;
    for group in [ClosedSubgroup::circle([0.0, 0.0, 1.0])?, ClosedSubgroup::full_so3()] {
        let r = hypercube_side(&ball, &x, &group, u)?;
        for h in [0.2, 0.1, 0.05] {
            let grid = build_orbit_grid(&ball, &x, &group, h, u)?;
            let d = group.orbit_dimension(&ball)? as i32;
            println!(
                "{group}: h = {h}, m = {}, lower bound {:.2}",
                grid.m(),
                (r / (2.0 * h)).powi(d).max(1.0)
            );
        }
    }

    let circle = ClosedSubgroup::circle([0.0, 0.0, 1.0])?;
    let grid = build_orbit_grid(&ball, &x, &circle, 0.1, u)?;
    let target = grid.orbit_points(&ball)?[3].clone();
    let g = recover_group_element(&ball, &x, &target, &circle)?;
    println!("recovered element maps x to {:?}", g.act(&ball, &x)?.coords());

    let torus = CovariateSpace::torus(2)?;
    let line = ClosedSubgroup::torus_line(1, 1)?;
    let grid = build_orbit_grid(&torus, &Point::xy(0.1, 0.4), &line, 0.05, u)?;
    println!("torus line (1,1): m = {}", grid.m());
    Ok(())
}
