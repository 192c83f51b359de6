//! Points, metrics and group actions on the four covariate spaces.

use std::f64::consts::FRAC_PI_2;

use symreg::{CovariateSpace, GroupElement, Point, Rotation};

fn main() -> symreg::Result<()> {
    let ball = CovariateSpace::UnitBall3;
    let x = Point::xyz(0.5, 0.0, 0.0);
    let quarter = GroupElement::Rotation3(Rotation::from_axis_angle([0.0, 0.0, 1.0], FRAC_PI_2));
    let y = quarter.act(&ball, &x)?;
    println!("quarter turn about z: {:?} -> {:?}", x.coords(), y.coords());
    println!("ball distance: {:.6}", ball.distance(&x, &y)?);

    let sphere = CovariateSpace::UnitSphere2;
    let n = Point::xyz(0.0, 0.0, 1.0);
    let e = Point::xyz(1.0, 0.0, 0.0);
    println!("sphere geodesic pole to equator: {:.6}", sphere.distance(&n, &e)?);

    let torus = CovariateSpace::torus(2)?;
    let a = Point::xy(0.05, 0.5);
    let shift = GroupElement::torus_shift(&[0.9, 0.0])?;
    let b = shift.act(&torus, &a)?;
    println!("torus shift wraps: {:?} -> {:?}", a.coords(), b.coords());
    println!("torus distance: {:.6}", torus.distance(&a, &b)?);

    let bx = CovariateSpace::periodic_box(&[2.0, 3.0])?;
    let t = GroupElement::box_translation(&[1.5, -1.0])?;
    println!("box translation: {:?}", t.act(&bx, &Point::xy(1.0, 0.5))?.coords());

    let r = GroupElement::Rotation3(Rotation::from_axis_angle([1.0, 0.0, 0.0], 0.3));
    println!("rotation distance to identity: {:.6}", r.magnitude());
    Ok(())
}
