//! Orbit grids: the finite symmetrising sets `{g^i_{x,h}}`.
//!
//! For a base point `x`, a subgroup `G` and a bandwidth `h`:
//!
//! 1. take the largest hypercube `W` (side `R`) in the tangent space of the
//!    orbit `[x]_U` that lies inside the orthogonal projection of `[x]_U`;
//! 2. lay a grid of spacing `2h` in `W`, centred on the tangent origin, with
//!    `⌊R/2h⌋ + 1` points per axis;
//! 3. project each grid point orthogonally back onto the sheet of `[x]_U`
//!    containing `x`, and pick a group element carrying `x` there.
//!
//! Orthogonal projection onto the tangent space is 1-Lipschitz, so the
//! projected points stay at least `2h` apart, and the per-axis count gives
//! `m ≥ (R/2h)^{d^G}`.
//!
//! Flat spaces (torus, periodic box) are handled through their isometric
//! embedding as a product of circles of radius `side/2π` in `ℝ^{2d}`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{invalid, Result, SymError};
use crate::group::{GroupElement, ParentGroup};
use crate::rotation::{any_orthogonal, cross, dot, norm, scale, sub, Rotation, Vec3};
use crate::space::{wrap, Coords, CovariateSpace, Point};
use crate::subgroups::{ClosedSubgroup, CompactNeighborhood, SubgroupFamily};

/// Below this orbit radius a base point is treated as fixed by the group.
const SINGULAR_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitGrid {
    pub base: Point,
    pub group: ClosedSubgroup,
    pub bandwidth: f64,
    pub elements: Vec<GroupElement>,
    pub hypercube_side: f64,
    /// The base point is fixed by the whole group; the grid is `{e}`.
    pub singular: bool,
}

impl OrbitGrid {
    pub fn m(&self) -> usize {
        self.elements.len()
    }

    /// Orbit points `g^i · x`.
    pub fn orbit_points(&self, space: &CovariateSpace) -> Result<Vec<Point>> {
        self.elements.iter().map(|g| g.act(space, &self.base)).collect()
    }
}

fn check_pair(space: &CovariateSpace, x: &Point, group: &ClosedSubgroup) -> Result<()> {
    if !group.parent().acts_on(space) {
        return Err(SymError::IncompatibleSubgroup {
            subgroup: group.to_string(),
            space: space.to_string(),
        });
    }
    space.validate(x)
}

/// Radius of the circle orbit of `x` about `axis`, its centre, and the
/// offset of `x` from the centre.
fn circle_geometry(x: Vec3, axis: Vec3) -> (f64, Vec3) {
    let along = dot(x, axis);
    let perp = sub(x, scale(axis, along));
    (norm(perp), perp)
}

/// Radius of the embedding circle for a coordinate of period `side`.
fn embed_radius(side: f64) -> f64 {
    side / (2.0 * PI)
}

/// Projection of the torus line `t ↦ x + t·dir` onto its tangent at `x`,
/// through the flat-torus embedding: `s(t) = Σ_k dir_k r sin(t dir_k / r)`.
fn line_projection(dir: [f64; 2], r: f64, t: f64) -> f64 {
    dir.iter().map(|d| d * r * (t * d / r).sin()).sum()
}

fn line_projection_slope(dir: [f64; 2], r: f64, t: f64) -> f64 {
    dir.iter().map(|d| d * d * (t * d / r).cos()).sum()
}

/// First positive critical point of the line projection: the end of the
/// sheet through `x` on which the projection is monotone.
fn line_sheet_end(dir: [f64; 2], r: f64) -> f64 {
    let max_d = dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    // s'(t) > 0 until at least t = πr/(2 max|d|); scan beyond it for the first sign change
    let step = r / max_d * 1e-3;
    let mut lo = 0.0;
    let mut hi = step;
    while line_projection_slope(dir, r, hi) > 0.0 {
        lo = hi;
        hi += step;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if line_projection_slope(dir, r, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Inverts the monotone line projection on `[-t_end, t_end]`.
fn invert_line_projection(dir: [f64; 2], r: f64, t_end: f64, a: f64) -> f64 {
    let (mut lo, mut hi) = (-t_end, t_end);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if line_projection(dir, r, mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn unit_direction(p: i64, q: i64) -> [f64; 2] {
    let ell = ((p * p + q * q) as f64).sqrt();
    [p as f64 / ell, q as f64 / ell]
}

/// Side length `R` of the largest tangent hypercube inside the projected orbit.
pub fn hypercube_side(
    space: &CovariateSpace,
    x: &Point,
    group: &ClosedSubgroup,
    u: CompactNeighborhood,
) -> Result<f64> {
    check_pair(space, x, group)?;
    Ok(match group.family() {
        SubgroupFamily::Trivial => 1.0,
        SubgroupFamily::FullSO3 => SQRT_2 * x.norm(),
        SubgroupFamily::Circle3 { axis } => 2.0 * circle_geometry(x.vec3(), *axis).0,
        SubgroupFamily::TorusLine { p, q } => {
            let dir = unit_direction(*p, *q);
            let r = embed_radius(1.0);
            2.0 * line_projection(dir, r, line_sheet_end(dir, r))
        }
        SubgroupFamily::FullTorus { .. } => 2.0 * embed_radius(1.0),
        SubgroupFamily::AxisTranslations { mask } => {
            let CovariateSpace::Box { sides } = space else {
                unreachable!("checked by acts_on")
            };
            box_axes(sides, *mask, u)?
                .iter()
                .map(|(_, r, reach)| 2.0 * r * reach.sin())
                .fold(f64::INFINITY, f64::min)
        }
    })
}

/// Masked axes of a periodic box with their embedding radius and the largest
/// angle reachable inside `U` on the near sheet.
fn box_axes(sides: &Coords, mask: u32, u: CompactNeighborhood) -> Result<Vec<(usize, f64, f64)>> {
    let CompactNeighborhood::Cube { radius } = u else {
        return Err(invalid("U", "translation subgroups need a bounded cube U"));
    };
    Ok(sides
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(i, s)| {
            let r = embed_radius(*s);
            (i, r, (radius / r).min(FRAC_PI_2))
        })
        .collect())
}

/// Grid offsets along one tangent axis of a hypercube of side `side`:
/// `⌊side/2h⌋ + 1` points spaced `2h`, symmetric about 0.
fn axis_offsets(side: f64, h: f64) -> Vec<f64> {
    let count = (side / (2.0 * h) * (1.0 + 1e-12)).floor() as usize + 1;
    let centre = (count as f64 - 1.0) / 2.0;
    (0..count).map(|i| (i as f64 - centre) * 2.0 * h).collect()
}

pub fn build_orbit_grid(
    space: &CovariateSpace,
    x: &Point,
    group: &ClosedSubgroup,
    h: f64,
    u: CompactNeighborhood,
) -> Result<OrbitGrid> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", "bandwidth must be positive and finite"));
    }
    let side = hypercube_side(space, x, group, u)?;
    let mut singular = false;
    let elements = match group.family() {
        SubgroupFamily::Trivial => vec![group.parent().identity()],
        SubgroupFamily::Circle3 { axis } => {
            let (r, _) = circle_geometry(x.vec3(), *axis);
            if r < SINGULAR_RADIUS {
                singular = true;
                vec![ParentGroup::SO3.identity()]
            } else {
                axis_offsets(side, h)
                    .into_iter()
                    .map(|a| {
                        let phi = (a / r).clamp(-1.0, 1.0).asin();
                        GroupElement::Rotation3(Rotation::from_axis_angle(*axis, phi))
                    })
                    .collect()
            }
        }
        SubgroupFamily::FullSO3 => {
            let v = x.vec3();
            let rho = norm(v);
            if rho < SINGULAR_RADIUS {
                singular = true;
                vec![ParentGroup::SO3.identity()]
            } else {
                let xhat = scale(v, 1.0 / rho);
                let e1 = any_orthogonal(xhat);
                let e2 = cross(xhat, e1);
                let offsets = axis_offsets(side, h);
                let mut out = Vec::with_capacity(offsets.len() * offsets.len());
                for a in &offsets {
                    for b in &offsets {
                        let normal = (rho * rho - a * a - b * b).max(0.0).sqrt();
                        let y = [
                            normal * xhat[0] + a * e1[0] + b * e2[0],
                            normal * xhat[1] + a * e1[1] + b * e2[1],
                            normal * xhat[2] + a * e1[2] + b * e2[2],
                        ];
                        out.push(GroupElement::Rotation3(Rotation::between(v, y)));
                    }
                }
                out
            }
        }
        SubgroupFamily::TorusLine { p, q } => {
            let dir = unit_direction(*p, *q);
            let r = embed_radius(1.0);
            let t_end = line_sheet_end(dir, r);
            axis_offsets(side, h)
                .into_iter()
                .map(|a| {
                    let t = invert_line_projection(dir, r, t_end, a);
                    GroupElement::torus_shift(&[t * dir[0], t * dir[1]])
                })
                .collect::<Result<_>>()?
        }
        SubgroupFamily::FullTorus { dim } => {
            let r = embed_radius(1.0);
            let shifts: Vec<f64> = axis_offsets(side, h)
                .into_iter()
                .map(|a| (a / r).clamp(-1.0, 1.0).asin() * r)
                .collect();
            let mut out = Vec::new();
            product(*dim, shifts.len(), |idx| {
                let c: Vec<f64> = idx.iter().map(|i| shifts[*i]).collect();
                out.push(GroupElement::torus_shift(&c));
            });
            out.into_iter().collect::<Result<_>>()?
        }
        SubgroupFamily::AxisTranslations { mask } => {
            let CovariateSpace::Box { sides } = space else {
                unreachable!("checked by hypercube_side")
            };
            let axes = box_axes(sides, *mask, u)?;
            let offsets = axis_offsets(side, h);
            let mut out = Vec::new();
            product(axes.len(), offsets.len(), |idx| {
                let mut c = vec![0.0; sides.len()];
                for ((axis, r, _), i) in axes.iter().zip(idx) {
                    c[*axis] = (offsets[*i] / r).clamp(-1.0, 1.0).asin() * r;
                }
                out.push(GroupElement::box_translation(&c));
            });
            out.into_iter().collect::<Result<_>>()?
        }
    };
    Ok(OrbitGrid {
        base: x.clone(),
        group: group.clone(),
        bandwidth: h,
        elements,
        hypercube_side: side,
        singular,
    })
}

fn product(dim: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; dim];
    if dim == 0 {
        visit(&idx);
        return;
    }
    'outer: loop {
        visit(&idx);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < n {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
}

/// A group element of `G` carrying `x` to `target`, which must lie on the
/// orbit `[x]_G` (tolerance 1e-9). Rotations use the minimal-angle choice.
pub fn recover_group_element(
    space: &CovariateSpace,
    x: &Point,
    target: &Point,
    group: &ClosedSubgroup,
) -> Result<GroupElement> {
    const TOL: f64 = 1e-9;
    check_pair(space, x, group)?;
    space.validate(target)?;
    let g = match group.family() {
        SubgroupFamily::Trivial => group.parent().identity(),
        SubgroupFamily::FullSO3 => {
            let (a, b) = (x.vec3(), target.vec3());
            let deviation = (norm(a) - norm(b)).abs();
            if deviation > TOL {
                return Err(SymError::OffOrbit { deviation });
            }
            if norm(a) < SINGULAR_RADIUS {
                ParentGroup::SO3.identity()
            } else {
                GroupElement::Rotation3(Rotation::between(a, b))
            }
        }
        SubgroupFamily::Circle3 { axis } => {
            let (ra, pa) = circle_geometry(x.vec3(), *axis);
            let (rb, pb) = circle_geometry(target.vec3(), *axis);
            let deviation = (ra - rb)
                .abs()
                .max((dot(x.vec3(), *axis) - dot(target.vec3(), *axis)).abs());
            if deviation > TOL {
                return Err(SymError::OffOrbit { deviation });
            }
            if ra < SINGULAR_RADIUS {
                ParentGroup::SO3.identity()
            } else {
                let phi = dot(*axis, cross(pa, pb)).atan2(dot(pa, pb));
                GroupElement::Rotation3(Rotation::from_axis_angle(*axis, phi))
            }
        }
        SubgroupFamily::TorusLine { .. } | SubgroupFamily::FullTorus { .. } => {
            let diff: Vec<f64> = target
                .coords()
                .iter()
                .zip(x.coords())
                .map(|(b, a)| wrap(b - a, 1.0))
                .collect();
            let g = GroupElement::torus_shift(&diff)?;
            let deviation = group.distance_to(&g, CompactNeighborhood::WholeGroup)?;
            if deviation > TOL {
                return Err(SymError::OffOrbit { deviation });
            }
            g
        }
        SubgroupFamily::AxisTranslations { mask } => {
            let CovariateSpace::Box { sides } = space else {
                unreachable!("checked by acts_on")
            };
            let mut diff = Vec::with_capacity(sides.len());
            let mut deviation = 0.0f64;
            for (i, ((b, a), s)) in target.coords().iter().zip(x.coords()).zip(sides).enumerate() {
                let mut d = wrap(b - a, *s);
                if d > s / 2.0 {
                    d -= s;
                }
                if mask & (1 << i) == 0 {
                    deviation = deviation.max(d.abs());
                    d = 0.0;
                }
                diff.push(d);
            }
            if deviation > TOL {
                return Err(SymError::OffOrbit { deviation });
            }
            GroupElement::box_translation(&diff)?
        }
    };
    let landed = g.act(space, x)?;
    let deviation = space.distance(&landed, target)?;
    if deviation > TOL {
        return Err(SymError::OffOrbit { deviation });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const WHOLE: CompactNeighborhood = CompactNeighborhood::WholeGroup;

    fn min_pairwise(space: &CovariateSpace, pts: &[Point]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min(space.distance(&pts[i], &pts[j]).unwrap());
            }
        }
        best
    }

    #[test]
    fn trivial_grid_is_identity() {
        let g = ClosedSubgroup::trivial(ParentGroup::SO3);
        let x = Point::xyz(0.1, 0.2, 0.3);
        let grid = build_orbit_grid(&CovariateSpace::UnitBall3, &x, &g, 0.05, WHOLE).unwrap();
        assert_eq!(grid.m(), 1);
        assert_eq!(grid.elements[0], ParentGroup::SO3.identity());
        assert_eq!(grid.hypercube_side, 1.0);
    }

    #[test]
    fn side_lengths() {
        let x = Point::xyz(0.3, 0.4, 0.0);
        let so3 = ClosedSubgroup::full_so3();
        let r = hypercube_side(&CovariateSpace::UnitBall3, &x, &so3, WHOLE).unwrap();
        // √2 · ‖x‖ with ‖x‖ = 0.5
        assert_abs_diff_eq!(r, 2f64.sqrt() * 0.5, epsilon = 1e-12);

        let c = 0.9;
        let phi: f64 = 0.7;
        let x = Point::xyz(0.6 * phi.cos() * c, 0.6 * phi.sin() * c, 0.8 * c);
        let z = ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap();
        let r = hypercube_side(&CovariateSpace::UnitBall3, &x, &z, WHOLE).unwrap();
        assert_abs_diff_eq!(r, 1.2 * c, epsilon = 1e-12);
    }

    #[test]
    fn flat_torus_sides() {
        let t2 = CovariateSpace::torus(2).unwrap();
        let x = Point::xy(0.3, 0.6);
        let axis = ClosedSubgroup::torus_line(1, 0).unwrap();
        assert_abs_diff_eq!(hypercube_side(&t2, &x, &axis, WHOLE).unwrap(), 1.0 / PI, epsilon = 1e-9);
        let diag = ClosedSubgroup::torus_line(1, 1).unwrap();
        assert_abs_diff_eq!(
            hypercube_side(&t2, &x, &diag, WHOLE).unwrap(),
            SQRT_2 / PI,
            epsilon = 1e-9
        );
        let full = ClosedSubgroup::full_torus(2);
        assert_abs_diff_eq!(
            hypercube_side(&t2, &x, &full, WHOLE).unwrap(),
            1.0 / PI,
            epsilon = 1e-15
        );
    }

    #[test]
    fn equator_circle_grid() {
        let z = ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap();
        let x = Point::xyz(1.0, 0.0, 0.0);
        let space = CovariateSpace::UnitSphere2;
        let grid = build_orbit_grid(&space, &x, &z, 0.1, WHOLE).unwrap();
        assert!(grid.m() >= 10);
        let pts = grid.orbit_points(&space).unwrap();
        // chord spacing, checked in the ambient metric
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = CovariateSpace::UnitBall3.distance(&pts[i], &pts[j]).unwrap();
                assert!(d >= 0.2 - 1e-9);
            }
        }
    }

    #[test]
    fn sphere_orbit_grid() {
        let g = ClosedSubgroup::full_so3();
        let x = Point::xyz(0.0, 0.6, 0.8);
        let space = CovariateSpace::UnitSphere2;
        let grid = build_orbit_grid(&space, &x, &g, 0.1, WHOLE).unwrap();
        assert!(grid.m() as f64 >= (SQRT_2 / 0.2f64).powi(2));
        let pts = grid.orbit_points(&space).unwrap();
        assert!(min_pairwise(&space, &pts) >= 0.2 - 1e-9);
    }

    #[test]
    fn singular_points() {
        let g = ClosedSubgroup::full_so3();
        let origin = Point::xyz(0.0, 0.0, 0.0);
        let grid = build_orbit_grid(&CovariateSpace::UnitBall3, &origin, &g, 0.1, WHOLE).unwrap();
        assert!(grid.singular);
        assert_eq!(grid.m(), 1);
        let z = ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap();
        let on_axis = Point::xyz(0.0, 0.0, 0.5);
        let grid = build_orbit_grid(&CovariateSpace::UnitBall3, &on_axis, &z, 0.1, WHOLE).unwrap();
        assert!(grid.singular);
        assert_eq!(grid.m(), 1);
    }

    #[test]
    fn wide_bandwidth_gives_single_point() {
        let g = ClosedSubgroup::full_so3();
        let x = Point::xyz(0.5, 0.0, 0.0);
        let grid = build_orbit_grid(&CovariateSpace::UnitBall3, &x, &g, 0.5, WHOLE).unwrap();
        assert_eq!(grid.m(), 1);
        assert_eq!(grid.elements[0], ParentGroup::SO3.identity());
    }

    #[test]
    fn bad_bandwidth() {
        let g = ClosedSubgroup::full_so3();
        let x = Point::xyz(0.5, 0.0, 0.0);
        assert!(build_orbit_grid(&CovariateSpace::UnitBall3, &x, &g, 0.0, WHOLE).is_err());
    }

    #[test]
    fn recover_examples() {
        let space = CovariateSpace::UnitBall3;
        let x = Point::xyz(1.0, 0.0, 0.0);
        let g = recover_group_element(&space, &x, &x, &ClosedSubgroup::full_so3()).unwrap();
        assert!(g.magnitude() < 1e-15);
        let g = recover_group_element(&space, &x, &Point::xyz(0.0, 1.0, 0.0), &ClosedSubgroup::full_so3()).unwrap();
        let expected = GroupElement::Rotation3(Rotation::from_axis_angle([0.0, 0.0, 1.0], FRAC_PI_2));
        assert!(g.distance(&expected).unwrap() < 1e-12);

        let t2 = CovariateSpace::torus(2).unwrap();
        let g = recover_group_element(
            &t2,
            &Point::xy(0.2, 0.2),
            &Point::xy(0.9, 0.5),
            &ClosedSubgroup::full_torus(2),
        )
        .unwrap();
        let GroupElement::TorusShift(s) = g else { panic!() };
        assert_abs_diff_eq!(s[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn recover_off_orbit() {
        let space = CovariateSpace::UnitBall3;
        let z = ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap();
        let err =
            recover_group_element(&space, &Point::xyz(0.5, 0.0, 0.0), &Point::xyz(0.0, 0.5, 0.1), &z).unwrap_err();
        match err {
            SymError::OffOrbit { deviation } => assert_abs_diff_eq!(deviation, 0.1, epsilon = 1e-12),
            other => panic!("unexpected {other}"),
        }
        let t2 = CovariateSpace::torus(2).unwrap();
        let line = ClosedSubgroup::torus_line(1, 0).unwrap();
        assert!(matches!(
            recover_group_element(&t2, &Point::xy(0.1, 0.1), &Point::xy(0.5, 0.3), &line),
            Err(SymError::OffOrbit { .. })
        ));
    }

    #[test]
    fn halving_h_never_shrinks_grid() {
        let space = CovariateSpace::UnitBall3;
        let x = Point::xyz(0.2, -0.5, 0.6);
        for g in [
            ClosedSubgroup::full_so3(),
            ClosedSubgroup::circle([1.0, 1.0, 0.0]).unwrap(),
        ] {
            let mut h = 0.8;
            let mut last = 0;
            while h > 0.005 {
                let m = build_orbit_grid(&space, &x, &g, h, WHOLE).unwrap().m();
                assert!(m >= last);
                last = m;
                h /= 2.0;
            }
        }
    }
}
