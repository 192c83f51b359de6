//! Covariate spaces and their points.

use std::fmt;
use std::str::FromStr;

use arrayvec::ArrayVec;

use crate::error::{invalid, Result, SymError};
use crate::rotation::{cross, dot, norm, Vec3};

/// Largest ambient dimension a [`Point`] can carry.
pub const MAX_DIM: usize = 8;

pub type Coords = ArrayVec<f64, MAX_DIM>;

/// A point in ambient coordinates. Membership is checked against a
/// [`CovariateSpace`] by [`CovariateSpace::validate`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Point {
    coords: Coords,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.len() > MAX_DIM {
            return Err(invalid(
                "coords",
                format!("dimension {} exceeds {MAX_DIM}", coords.len()),
            ));
        }
        Ok(Point {
            coords: coords.iter().copied().collect(),
        })
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point {
            coords: [x, y, z].into_iter().collect(),
        }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point {
            coords: [x, y].into_iter().collect(),
        }
    }

    pub(crate) fn from_coords(coords: Coords) -> Self {
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// First three coordinates as a vector (zero-padded).
    pub fn vec3(&self) -> Vec3 {
        let mut v = [0.0; 3];
        for (dst, src) in v.iter_mut().zip(self.coords.iter()) {
            *dst = *src;
        }
        v
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl From<Vec3> for Point {
    fn from(v: Vec3) -> Self {
        Point::xyz(v[0], v[1], v[2])
    }
}

/// The domain of the regression function.
///
/// `Torus` is the flat unit torus `(ℝ/ℤ)^d`. `Box` is a periodic box with the
/// given side lengths: translations wrap around, so it is a flat torus with
/// unequal sides.
#[derive(Debug, Clone, PartialEq)]
pub enum CovariateSpace {
    UnitBall3,
    UnitSphere2,
    Torus { dim: usize },
    Box { sides: Coords },
}

impl CovariateSpace {
    pub fn torus(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("dim", format!("torus dimension must be in 1..={MAX_DIM}")));
        }
        Ok(CovariateSpace::Torus { dim })
    }

    pub fn periodic_box(sides: &[f64]) -> Result<Self> {
        if sides.is_empty() || sides.len() > MAX_DIM {
            return Err(invalid("sides", format!("box dimension must be in 1..={MAX_DIM}")));
        }
        if sides.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(invalid("sides", "side lengths must be positive and finite"));
        }
        Ok(CovariateSpace::Box {
            sides: sides.iter().copied().collect(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2 => 3,
            CovariateSpace::Torus { dim } => *dim,
            CovariateSpace::Box { sides } => sides.len(),
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self {
            CovariateSpace::UnitBall3 => 3,
            CovariateSpace::UnitSphere2 => 2,
            CovariateSpace::Torus { dim } => *dim,
            CovariateSpace::Box { sides } => sides.len(),
        }
    }

    /// Period of each coordinate for the flat spaces, `None` for ball/sphere.
    pub fn periods(&self) -> Option<Coords> {
        match self {
            CovariateSpace::Torus { dim } => Some((0..*dim).map(|_| 1.0).collect()),
            CovariateSpace::Box { sides } => Some(sides.clone()),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.ambient_dim() || p.coords().iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            CovariateSpace::UnitBall3 => p.norm() <= 1.0 + 1e-12,
            CovariateSpace::UnitSphere2 => (p.norm() - 1.0).abs() <= 1e-12,
            CovariateSpace::Torus { .. } => p.coords().iter().all(|c| (0.0..1.0).contains(c)),
            CovariateSpace::Box { sides } => p.coords().iter().zip(sides.iter()).all(|(c, s)| (0.0..*s).contains(c)),
        }
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(SymError::NotInSpace {
                coords: p.coords().to_vec(),
                space: self.to_string(),
            })
        }
    }

    /// Intrinsic distance; errors when either point has the wrong dimension.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        let d = self.ambient_dim();
        if a.dim() != d || b.dim() != d {
            return Err(SymError::SpaceMismatch {
                left: format!("{}-dim point", a.dim()),
                right: format!("{}-dim point", b.dim()),
            });
        }
        Ok(self.distance_unchecked(a.coords(), b.coords()))
    }

    /// Distance on raw coordinate slices of the right dimension.
    ///
    /// Euclidean on the ball, great-circle on the sphere, wrap-around
    /// Euclidean on the torus and periodic box.
    #[inline]
    pub fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            CovariateSpace::UnitBall3 => {
                let dx = a[0] - b[0];
                let dy = a[1] - b[1];
                let dz = a[2] - b[2];
                (dx * dx + dy * dy + dz * dz).sqrt()
            }
            CovariateSpace::UnitSphere2 => {
                let u = [a[0], a[1], a[2]];
                let v = [b[0], b[1], b[2]];
                norm(cross(u, v)).atan2(dot(u, v))
            }
            CovariateSpace::Torus { .. } => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = wrap_gap(x - y, 1.0);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            CovariateSpace::Box { sides } => a
                .iter()
                .zip(b)
                .zip(sides)
                .map(|((x, y), s)| {
                    let d = wrap_gap(x - y, *s);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
        }
    }
}

impl fmt::Display for CovariateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CovariateSpace::UnitBall3 => write!(f, "ball3"),
            CovariateSpace::UnitSphere2 => write!(f, "sphere2"),
            CovariateSpace::Torus { dim } => write!(f, "torus{dim}"),
            CovariateSpace::Box { sides } => {
                write!(f, "box(")?;
                for (i, s) in sides.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Inverse of the `Display` form: `ball3`, `sphere2`, `torus<d>`, `box(a,b,..)`.
impl FromStr for CovariateSpace {
    type Err = SymError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "ball3" => return Ok(CovariateSpace::UnitBall3),
            "sphere2" => return Ok(CovariateSpace::UnitSphere2),
            _ => {}
        }
        if let Some(d) = s.strip_prefix("torus") {
            let dim = d
                .parse()
                .map_err(|_| invalid("space", format!("bad torus dimension in `{s}`")))?;
            return CovariateSpace::torus(dim);
        }
        if let Some(inner) = s.strip_prefix("box(").and_then(|r| r.strip_suffix(')')) {
            let sides = inner
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| invalid("space", format!("bad box sides in `{s}`")))?;
            return CovariateSpace::periodic_box(&sides);
        }
        Err(invalid("space", format!("unknown space `{s}`")))
    }
}

/// Reduces `v` into `[0, period)`.
#[inline]
pub fn wrap(v: f64, period: f64) -> f64 {
    let r = v - (v / period).floor() * period;
    if r >= period || r < 0.0 {
        0.0
    } else {
        r
    }
}

/// Length of the shortest representative of `v` modulo `period`.
#[inline]
pub fn wrap_gap(v: f64, period: f64) -> f64 {
    let a = v.abs();
    if a < period {
        return a.min(period - a);
    }
    let r = wrap(v, period);
    r.min(period - r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn self_distance_is_zero() {
        let x = Point::xyz(0.1, -0.2, 0.3);
        assert_eq!(CovariateSpace::UnitBall3.distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn quarter_great_circle() {
        let d = CovariateSpace::UnitSphere2
            .distance(&Point::xyz(1.0, 0.0, 0.0), &Point::xyz(0.0, 1.0, 0.0))
            .unwrap();
        assert_abs_diff_eq!(d, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn torus_wraps() {
        let t = CovariateSpace::torus(2).unwrap();
        let d = t.distance(&Point::xy(0.95, 0.5), &Point::xy(0.05, 0.5)).unwrap();
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn membership() {
        assert!(CovariateSpace::UnitBall3.contains(&Point::xyz(0.5, 0.5, 0.5)));
        assert!(!CovariateSpace::UnitBall3.contains(&Point::xyz(1.0, 1.0, 0.0)));
        assert!(CovariateSpace::UnitSphere2.contains(&Point::xyz(0.0, 0.0, 1.0)));
        assert!(!CovariateSpace::UnitSphere2.contains(&Point::xyz(0.0, 0.0, 0.9)));
        let t = CovariateSpace::torus(2).unwrap();
        assert!(t.contains(&Point::xy(0.0, 0.999)));
        assert!(!t.contains(&Point::xy(1.0, 0.5)));
        assert!(!t.contains(&Point::xyz(0.1, 0.1, 0.1)));
        let b = CovariateSpace::periodic_box(&[2.0, 0.5]).unwrap();
        assert!(b.contains(&Point::xy(1.5, 0.25)));
        assert!(!b.contains(&Point::xy(1.5, 0.75)));
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let t = CovariateSpace::torus(2).unwrap();
        assert!(matches!(
            t.distance(&Point::xy(0.1, 0.1), &Point::xyz(0.1, 0.1, 0.1)),
            Err(SymError::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn wrap_edge_cases() {
        assert_eq!(wrap(-1e-18, 1.0), 0.0);
        assert_abs_diff_eq!(wrap(1.3, 1.0), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_gap(0.8, 1.0), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_gap(-0.7, 1.0), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_gap(2.3, 1.0), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_gap(-3.9, 2.0), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn space_names_round_trip() {
        for s in [
            CovariateSpace::UnitBall3,
            CovariateSpace::UnitSphere2,
            CovariateSpace::torus(2).unwrap(),
            CovariateSpace::periodic_box(&[1.5, 2.0]).unwrap(),
        ] {
            assert_eq!(s.to_string().parse::<CovariateSpace>().unwrap(), s);
        }
        assert!("cube".parse::<CovariateSpace>().is_err());
        assert!("box(1,x)".parse::<CovariateSpace>().is_err());
    }
}
