//! Group elements, their composition and their action on covariate spaces.

use std::fmt;

use crate::error::{Result, SymError};
use crate::rotation::Rotation;
use crate::space::{wrap, wrap_gap, Coords, CovariateSpace, Point, MAX_DIM};

/// The ambient symmetry group searched over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParentGroup {
    /// Rotations of ℝ³ acting on the unit ball or sphere.
    SO3,
    /// Translations of the flat torus `(ℝ/ℤ)^dim`.
    Torus { dim: usize },
    /// Translations of ℝ^dim acting by wrap-around on a periodic box.
    BoxTranslations { dim: usize },
}

impl ParentGroup {
    pub fn identity(&self) -> GroupElement {
        match self {
            ParentGroup::SO3 => GroupElement::Rotation3(Rotation::IDENTITY),
            ParentGroup::Torus { dim } => GroupElement::TorusShift(zeros(*dim)),
            ParentGroup::BoxTranslations { dim } => GroupElement::BoxTranslation(zeros(*dim)),
        }
    }

    /// Whether this group acts on `space`.
    pub fn acts_on(&self, space: &CovariateSpace) -> bool {
        match (self, space) {
            (ParentGroup::SO3, CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2) => true,
            (ParentGroup::Torus { dim }, CovariateSpace::Torus { dim: d }) => dim == d,
            (ParentGroup::BoxTranslations { dim }, CovariateSpace::Box { sides }) => *dim == sides.len(),
            _ => false,
        }
    }

    /// The natural parent group of `space`.
    pub fn for_space(space: &CovariateSpace) -> ParentGroup {
        match space {
            CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2 => ParentGroup::SO3,
            CovariateSpace::Torus { dim } => ParentGroup::Torus { dim: *dim },
            CovariateSpace::Box { sides } => ParentGroup::BoxTranslations { dim: sides.len() },
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, ParentGroup::BoxTranslations { .. })
    }

    /// Dimension of a principal orbit of the whole group.
    pub fn max_orbit_dimension(&self) -> usize {
        match self {
            ParentGroup::SO3 => 2,
            ParentGroup::Torus { dim } | ParentGroup::BoxTranslations { dim } => *dim,
        }
    }
}

impl fmt::Display for ParentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParentGroup::SO3 => write!(f, "SO3"),
            ParentGroup::Torus { dim } => write!(f, "T{dim}"),
            ParentGroup::BoxTranslations { dim } => write!(f, "R{dim}"),
        }
    }
}

fn zeros(dim: usize) -> Coords {
    (0..dim.min(MAX_DIM)).map(|_| 0.0).collect()
}

/// A transformation of a covariate space.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Rotation3(Rotation),
    /// Translation of the unit torus, coordinates kept in `[0, 1)`.
    TorusShift(Coords),
    /// Translation of ℝ^d; acts on a periodic box modulo its sides.
    BoxTranslation(Coords),
}

impl GroupElement {
    /// Torus shift reduced modulo 1.
    pub fn torus_shift(shift: &[f64]) -> Result<Self> {
        check_len(shift)?;
        Ok(GroupElement::TorusShift(shift.iter().map(|v| wrap(*v, 1.0)).collect()))
    }

    pub fn box_translation(shift: &[f64]) -> Result<Self> {
        check_len(shift)?;
        Ok(GroupElement::BoxTranslation(shift.iter().copied().collect()))
    }

    fn variant_name(&self) -> &'static str {
        match self {
            GroupElement::Rotation3(_) => "Rotation3",
            GroupElement::TorusShift(_) => "TorusShift",
            GroupElement::BoxTranslation(_) => "BoxTranslation",
        }
    }

    fn mismatch(&self, other: &GroupElement) -> SymError {
        SymError::VariantMismatch {
            left: self.to_string(),
            right: other.to_string(),
        }
    }

    /// Applies the element to `x`. The point must belong to a space the
    /// element's variant acts on.
    pub fn act(&self, space: &CovariateSpace, x: &Point) -> Result<Point> {
        if x.dim() != space.ambient_dim() {
            return Err(SymError::SpaceMismatch {
                left: space.to_string(),
                right: format!("{}-dim point", x.dim()),
            });
        }
        match (self, space) {
            (GroupElement::Rotation3(r), CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2) => {
                Ok(Point::from(r.rotate(x.vec3())))
            }
            (GroupElement::TorusShift(s), CovariateSpace::Torus { dim }) if s.len() == *dim => Ok(Point::from_coords(
                x.coords().iter().zip(s.iter()).map(|(c, t)| wrap(c + t, 1.0)).collect(),
            )),
            (GroupElement::BoxTranslation(s), CovariateSpace::Box { sides }) if s.len() == sides.len() => {
                Ok(Point::from_coords(
                    x.coords()
                        .iter()
                        .zip(s.iter())
                        .zip(sides.iter())
                        .map(|((c, t), p)| wrap(c + t, *p))
                        .collect(),
                ))
            }
            _ => Err(SymError::IncompatibleAction {
                element: self.variant_name().to_string(),
                space: space.to_string(),
            }),
        }
    }

    /// `g.compose(h)` acts as `g ∘ h`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Rotation3(a), GroupElement::Rotation3(b)) => Ok(GroupElement::Rotation3(a.compose(b))),
            (GroupElement::TorusShift(a), GroupElement::TorusShift(b)) if a.len() == b.len() => Ok(
                GroupElement::TorusShift(a.iter().zip(b).map(|(x, y)| wrap(x + y, 1.0)).collect()),
            ),
            (GroupElement::BoxTranslation(a), GroupElement::BoxTranslation(b)) if a.len() == b.len() => Ok(
                GroupElement::BoxTranslation(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            ),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Rotation3(r) => GroupElement::Rotation3(r.inverse()),
            GroupElement::TorusShift(s) => GroupElement::TorusShift(s.iter().map(|v| wrap(-v, 1.0)).collect()),
            GroupElement::BoxTranslation(s) => GroupElement::BoxTranslation(s.iter().map(|v| -v).collect()),
        }
    }

    /// Bi-invariant group metric: rotation angle of `g⁻¹h` for rotations,
    /// wrap-around Euclidean for torus shifts, Euclidean for translations.
    pub fn distance(&self, other: &GroupElement) -> Result<f64> {
        match (self, other) {
            (GroupElement::Rotation3(a), GroupElement::Rotation3(b)) => Ok(a.distance(b)),
            (GroupElement::TorusShift(a), GroupElement::TorusShift(b)) if a.len() == b.len() => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| wrap_gap(x - y, 1.0).powi(2))
                .sum::<f64>()
                .sqrt()),
            (GroupElement::BoxTranslation(a), GroupElement::BoxTranslation(b)) if a.len() == b.len() => {
                Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
            }
            _ => Err(self.mismatch(other)),
        }
    }

    /// Distance to the identity of the same variant.
    pub fn magnitude(&self) -> f64 {
        match self {
            GroupElement::Rotation3(r) => r.angle(),
            GroupElement::TorusShift(s) => s.iter().map(|v| wrap_gap(*v, 1.0).powi(2)).sum::<f64>().sqrt(),
            GroupElement::BoxTranslation(s) => s.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }
}

fn check_len(v: &[f64]) -> Result<()> {
    if v.is_empty() || v.len() > MAX_DIM {
        return Err(crate::error::invalid(
            "shift",
            format!("dimension must be in 1..={MAX_DIM}"),
        ));
    }
    Ok(())
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Rotation3(r) => write!(f, "{r}"),
            GroupElement::TorusShift(s) => write!(f, "shift{:?}", s.as_slice()),
            GroupElement::BoxTranslation(s) => write!(f, "translate{:?}", s.as_slice()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn identity_acts_trivially() {
        let x = Point::xyz(0.3, -0.1, 0.2);
        let y = ParentGroup::SO3.identity().act(&CovariateSpace::UnitBall3, &x).unwrap();
        assert_eq!(x, y);
        let t = CovariateSpace::torus(2).unwrap();
        let p = Point::xy(0.25, 0.75);
        assert_eq!(ParentGroup::Torus { dim: 2 }.identity().act(&t, &p).unwrap(), p);
    }

    #[test]
    fn torus_shift_mod_one() {
        let t = CovariateSpace::torus(2).unwrap();
        let g = GroupElement::torus_shift(&[0.6, 0.9]).unwrap();
        let y = g.act(&t, &Point::xy(0.7, 0.2)).unwrap();
        assert_abs_diff_eq!(y.coords()[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(y.coords()[1], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn torus_inverse_and_distance() {
        let g = GroupElement::torus_shift(&[0.3]).unwrap();
        match g.inverse() {
            GroupElement::TorusShift(s) => assert_abs_diff_eq!(s[0], 0.7, epsilon = 1e-15),
            other => panic!("unexpected {other}"),
        }
        let a = GroupElement::torus_shift(&[0.9, 0.0]).unwrap();
        let b = GroupElement::torus_shift(&[0.1, 0.0]).unwrap();
        assert_abs_diff_eq!(a.distance(&b).unwrap(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn rotation_half_turn() {
        let g = GroupElement::Rotation3(Rotation::from_axis_angle([0.0, 0.0, 1.0], PI));
        let y = g.act(&CovariateSpace::UnitBall3, &Point::xyz(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(y.coords()[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y.coords()[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn incompatible_variants_error() {
        let t = CovariateSpace::torus(2).unwrap();
        let r = ParentGroup::SO3.identity();
        assert!(matches!(
            r.act(&t, &Point::xy(0.1, 0.1)),
            Err(SymError::IncompatibleAction { .. })
        ));
        let s = GroupElement::torus_shift(&[0.1, 0.1]).unwrap();
        assert!(matches!(r.compose(&s), Err(SymError::VariantMismatch { .. })));
        assert!(matches!(r.distance(&s), Err(SymError::VariantMismatch { .. })));
    }

    #[test]
    fn compose_with_identity() {
        let g = GroupElement::Rotation3(Rotation::from_axis_angle([1.0, 1.0, 0.0], 0.7));
        let e = ParentGroup::SO3.identity();
        assert!(g.compose(&e).unwrap().distance(&g).unwrap() < 1e-15);
        assert!(g.compose(&g.inverse()).unwrap().distance(&e).unwrap() < 1e-12);
    }
}
