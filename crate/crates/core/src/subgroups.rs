//! Closed connected subgroups of the catalog groups, the Hausdorff(U) metric
//! between them, δ-covers of subgroup space and the δ_n schedule.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result, SymError};
use crate::group::{GroupElement, ParentGroup};
use crate::rotation::{dot, norm, Rotation, Vec3};
use crate::space::{wrap_gap, CovariateSpace};

/// Parametric family of a closed connected subgroup.
#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupFamily {
    Trivial,
    /// Rotations about a fixed axis (canonical sign, unit length).
    Circle3 {
        axis: Vec3,
    },
    FullSO3,
    /// Closed line through the origin of 𝕋² with primitive direction `(p, q)`.
    TorusLine {
        p: i64,
        q: i64,
    },
    FullTorus {
        dim: usize,
    },
    /// Translations along the coordinate axes selected by `mask`.
    AxisTranslations {
        mask: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSubgroup {
    parent: ParentGroup,
    family: SubgroupFamily,
}

/// The compact identity neighbourhood `U` used to truncate subgroups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompactNeighborhood {
    WholeGroup,
    Cube { radius: f64 },
}

impl CompactNeighborhood {
    /// The whole group for compact parents, `[-1, 1]^d` for translations.
    pub fn default_for(parent: ParentGroup) -> Self {
        if parent.is_compact() {
            CompactNeighborhood::WholeGroup
        } else {
            CompactNeighborhood::Cube { radius: 1.0 }
        }
    }

    fn cube_radius(&self) -> f64 {
        match self {
            CompactNeighborhood::WholeGroup => f64::INFINITY,
            CompactNeighborhood::Cube { radius } => *radius,
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn canonical_axis(axis: Vec3) -> Vec3 {
    const TOL: f64 = 1e-12;
    let flip = if axis[2].abs() > TOL {
        axis[2] < 0.0
    } else if axis[1].abs() > TOL {
        axis[1] < 0.0
    } else {
        axis[0] < 0.0
    };
    if flip {
        [-axis[0], -axis[1], -axis[2]]
    } else {
        axis
    }
}

impl ClosedSubgroup {
    pub fn trivial(parent: ParentGroup) -> Self {
        ClosedSubgroup {
            parent,
            family: SubgroupFamily::Trivial,
        }
    }

    /// `S¹_u`; the axis is normalised and sign-canonicalised (`S¹_u = S¹_{-u}`).
    pub fn circle(axis: Vec3) -> Result<Self> {
        let n = norm(axis);
        if !(n.is_finite() && n > 1e-12) {
            return Err(invalid("axis", "axis must be a nonzero finite vector"));
        }
        let u = canonical_axis([axis[0] / n, axis[1] / n, axis[2] / n]);
        Ok(ClosedSubgroup {
            parent: ParentGroup::SO3,
            family: SubgroupFamily::Circle3 { axis: u },
        })
    }

    pub fn full_so3() -> Self {
        ClosedSubgroup {
            parent: ParentGroup::SO3,
            family: SubgroupFamily::FullSO3,
        }
    }

    /// Closed line of 𝕋² along the coprime integer direction `(p, q)`.
    pub fn torus_line(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(invalid("direction", "(0, 0) is not a direction"));
        }
        if gcd(p, q) != 1 {
            return Err(invalid("direction", format!("({p}, {q}) is not primitive")));
        }
        let (p, q) = if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) };
        Ok(ClosedSubgroup {
            parent: ParentGroup::Torus { dim: 2 },
            family: SubgroupFamily::TorusLine { p, q },
        })
    }

    pub fn full_torus(dim: usize) -> Self {
        ClosedSubgroup {
            parent: ParentGroup::Torus { dim },
            family: SubgroupFamily::FullTorus { dim },
        }
    }

    /// Translations along the axes in `mask`; an empty mask is the trivial group.
    pub fn axis_translations(dim: usize, mask: u32) -> Result<Self> {
        if dim == 0 || dim > crate::space::MAX_DIM || (mask >> dim) != 0 {
            return Err(invalid("mask", format!("mask {mask:#b} does not fit dimension {dim}")));
        }
        let parent = ParentGroup::BoxTranslations { dim };
        if mask == 0 {
            return Ok(Self::trivial(parent));
        }
        Ok(ClosedSubgroup {
            parent,
            family: SubgroupFamily::AxisTranslations { mask },
        })
    }

    pub fn parent(&self) -> ParentGroup {
        self.parent
    }

    pub fn family(&self) -> &SubgroupFamily {
        &self.family
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.family, SubgroupFamily::Trivial)
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.family, SubgroupFamily::AxisTranslations { .. })
    }

    /// Dimension of a principal orbit of this subgroup acting on `space`.
    pub fn orbit_dimension(&self, space: &CovariateSpace) -> Result<usize> {
        if !self.parent.acts_on(space) {
            return Err(SymError::IncompatibleSubgroup {
                subgroup: self.to_string(),
                space: space.to_string(),
            });
        }
        Ok(self.orbit_dim())
    }

    pub(crate) fn orbit_dim(&self) -> usize {
        match &self.family {
            SubgroupFamily::Trivial => 0,
            SubgroupFamily::Circle3 { .. } | SubgroupFamily::TorusLine { .. } => 1,
            SubgroupFamily::FullSO3 => 2,
            SubgroupFamily::FullTorus { dim } => *dim,
            SubgroupFamily::AxisTranslations { mask } => mask.count_ones() as usize,
        }
    }

    fn family_rank(&self) -> u8 {
        match self.family {
            SubgroupFamily::Trivial => 0,
            SubgroupFamily::Circle3 { .. } => 1,
            SubgroupFamily::FullSO3 => 2,
            SubgroupFamily::TorusLine { .. } => 3,
            SubgroupFamily::FullTorus { .. } => 4,
            SubgroupFamily::AxisTranslations { .. } => 5,
        }
    }

    fn params(&self) -> Vec<f64> {
        match &self.family {
            SubgroupFamily::Circle3 { axis } => axis.to_vec(),
            SubgroupFamily::TorusLine { p, q } => vec![*p as f64, *q as f64],
            SubgroupFamily::FullTorus { dim } => vec![*dim as f64],
            SubgroupFamily::AxisTranslations { mask } => vec![*mask as f64],
            _ => Vec::new(),
        }
    }

    /// Total order on subgroups: family, then parameters lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.family_rank().cmp(&other.family_rank()).then_with(|| {
            let (a, b) = (self.params(), other.params());
            for (x, y) in a.iter().zip(&b) {
                match x.total_cmp(y) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            a.len().cmp(&b.len())
        })
    }

    /// Exact distance from `g` to `self ∩ U` in the group metric.
    pub fn distance_to(&self, g: &GroupElement, u: CompactNeighborhood) -> Result<f64> {
        let mismatch = || SymError::VariantMismatch {
            left: g.to_string(),
            right: self.to_string(),
        };
        match (&self.family, g) {
            (SubgroupFamily::Trivial, _) => {
                if self.parent.identity().distance(g).is_err() {
                    return Err(mismatch());
                }
                Ok(g.magnitude())
            }
            (SubgroupFamily::Circle3 { axis }, GroupElement::Rotation3(r)) => Ok(rotation_to_circle(r, *axis)),
            (SubgroupFamily::FullSO3, GroupElement::Rotation3(_)) => Ok(0.0),
            (SubgroupFamily::TorusLine { p, q }, GroupElement::TorusShift(s)) if s.len() == 2 => {
                let ell = ((p * p + q * q) as f64).sqrt();
                Ok(wrap_gap(s[0] * *q as f64 - s[1] * *p as f64, 1.0) / ell)
            }
            (SubgroupFamily::FullTorus { dim }, GroupElement::TorusShift(s)) if s.len() == *dim => Ok(0.0),
            (SubgroupFamily::AxisTranslations { mask }, GroupElement::BoxTranslation(s)) => {
                let r = u.cube_radius();
                Ok(s.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        if mask & (1 << i) != 0 {
                            (v.abs() - r).max(0.0).powi(2)
                        } else {
                            v * v
                        }
                    })
                    .sum::<f64>()
                    .sqrt())
            }
            _ => Err(mismatch()),
        }
    }

    /// Calls `visit` on every element of an `eps`-net of `self ∩ U`.
    pub fn for_each_net_element(
        &self,
        u: CompactNeighborhood,
        eps: f64,
        mut visit: impl FnMut(&GroupElement),
    ) -> Result<()> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid("net_resolution", "must be positive and finite"));
        }
        match &self.family {
            SubgroupFamily::Trivial => visit(&self.parent.identity()),
            SubgroupFamily::Circle3 { axis } => {
                let n = (TAU / eps).ceil() as usize;
                for k in 0..n {
                    let angle = TAU * k as f64 / n as f64;
                    visit(&GroupElement::Rotation3(Rotation::from_axis_angle(*axis, angle)));
                }
            }
            SubgroupFamily::FullSO3 => so3_net(eps, |r| visit(&GroupElement::Rotation3(r))),
            SubgroupFamily::TorusLine { p, q } => {
                let ell = ((p * p + q * q) as f64).sqrt();
                let n = (ell / eps).ceil() as usize;
                for k in 0..n {
                    let t = k as f64 / n as f64;
                    visit(&GroupElement::torus_shift(&[t * *p as f64, t * *q as f64])?);
                }
            }
            SubgroupFamily::FullTorus { dim } => {
                // step 1/n per axis leaves every point within √d/(2n) ≤ eps/2 of the net
                let n = ((*dim as f64).sqrt() / eps).ceil() as usize;
                lattice(*dim, n, |idx| {
                    let c: Vec<f64> = idx.iter().map(|k| *k as f64 / n as f64).collect();
                    if let Ok(g) = GroupElement::torus_shift(&c) {
                        visit(&g);
                    }
                });
            }
            SubgroupFamily::AxisTranslations { mask } => {
                let r = u.cube_radius();
                if !r.is_finite() {
                    return Err(invalid("U", "translation subgroups need a bounded cube U"));
                }
                let ParentGroup::BoxTranslations { dim } = self.parent else {
                    unreachable!("axis translations always have a box parent")
                };
                let axes: Vec<usize> = (0..dim).filter(|i| mask & (1 << i) != 0).collect();
                let k = axes.len();
                let steps = ((k as f64).sqrt() * 2.0 * r / eps).ceil() as usize;
                lattice(k, steps + 1, |idx| {
                    let mut c = vec![0.0; dim];
                    for (a, i) in axes.iter().zip(idx) {
                        c[*a] = -r + 2.0 * r * *i as f64 / steps as f64;
                    }
                    if let Ok(g) = GroupElement::box_translation(&c) {
                        visit(&g);
                    }
                });
            }
        }
        Ok(())
    }

    /// Materialised `eps`-net of `self ∩ U`.
    pub fn net(&self, u: CompactNeighborhood, eps: f64) -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        self.for_each_net_element(u, eps, |g| out.push(g.clone()))?;
        Ok(out)
    }
}

/// Angle from rotation `r` to the nearest rotation about `axis`.
fn rotation_to_circle(r: &Rotation, axis: Vec3) -> f64 {
    let v = r.vector();
    let along = dot(v, axis);
    let perp = [v[0] - along * axis[0], v[1] - along * axis[1], v[2] - along * axis[2]];
    let w = r.scalar();
    2.0 * norm(perp).atan2((w * w + along * along).sqrt())
}

/// ε-net of SO(3): a cube lattice on each of the four faces `|q_i| = 1` of
/// the quaternion hypercube, radially projected onto S³.
fn so3_net(eps: f64, mut visit: impl FnMut(Rotation)) {
    // lattice spacing s covers within s·√3/2 in ℝ⁴, i.e. a rotation angle ≤ s·√3
    let s = 0.95 * eps / 3f64.sqrt();
    let n = (2.0 / s).ceil() as usize + 1;
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    for face in 0..4 {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let q = [coord(i), coord(j), coord(k)];
                    let mut full = [0.0; 4];
                    full[face] = 1.0;
                    let mut it = q.iter();
                    for (slot, value) in full.iter_mut().enumerate() {
                        if slot != face {
                            *value = *it.next().expect("three free coordinates");
                        }
                    }
                    visit(Rotation::normalized(full[0], full[1], full[2], full[3]));
                }
            }
        }
    }
}

fn lattice(dim: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    if dim == 0 {
        visit(&[]);
        return;
    }
    let mut idx = vec![0usize; dim];
    loop {
        visit(&idx);
        let mut i = 0;
        loop {
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
            if i == dim {
                return;
            }
        }
    }
}

/// Hausdorff distance between `eps`-nets of `G ∩ U` and `H ∩ U`.
///
/// Each net point is measured exactly against the other subgroup, so the
/// result undershoots the true `d_Haus(U)` by at most `eps`.
pub fn hausdorff_u_distance(g: &ClosedSubgroup, h: &ClosedSubgroup, u: CompactNeighborhood, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("net_resolution", "must be positive and finite"));
    }
    if g.parent != h.parent {
        return Err(SymError::VariantMismatch {
            left: g.to_string(),
            right: h.to_string(),
        });
    }
    if g == h {
        return Ok(0.0);
    }
    let one_sided = |a: &ClosedSubgroup, b: &ClosedSubgroup| -> Result<f64> {
        let mut sup = 0.0f64;
        let mut err = None;
        a.for_each_net_element(u, eps, |x| match b.distance_to(x, u) {
            Ok(d) => sup = sup.max(d),
            Err(e) => err = Some(e),
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(sup),
        }
    };
    Ok(one_sided(g, h)?.max(one_sided(h, g)?))
}

/// A δ-cover of the closed connected subgroups of `parent`, stratified by
/// orbit dimension.
///
/// * SO(3): `{I, SO(3)}` plus circles whose axes form a spherical-coordinate
///   grid of step `δ/π`, with antipodal duplicates removed.
/// * 𝕋²: `{I, 𝕋²}` plus every closed line with primitive direction
///   `max(|p|, |q|) ≤ ⌈1/δ⌉`. A line of length `ℓ` lies within `1/(2ℓ)` of
///   𝕋², so any longer line is within `δ` of the longest listed one.
/// * ℝ^d translations: all axis-translation subgroups (a finite family).
pub fn delta_cover(parent: ParentGroup, space: &CovariateSpace, delta: f64) -> Result<Vec<ClosedSubgroup>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be positive and finite"));
    }
    if !parent.acts_on(space) {
        return Err(SymError::UnsupportedParent {
            parent: format!("{parent} on {space}"),
        });
    }
    let mut cover = vec![ClosedSubgroup::trivial(parent)];
    match parent {
        ParentGroup::SO3 => {
            cover.push(ClosedSubgroup::full_so3());
            let step = delta / PI;
            let n_theta = (PI / step).ceil() as usize;
            let n_phi = (TAU / step).ceil() as usize;
            let mut axes: Vec<Vec3> = Vec::new();
            for i in 0..=n_theta {
                let theta = (i as f64 * step).min(PI);
                for j in 0..n_phi {
                    let phi = j as f64 * step;
                    let u = canonical_axis([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                    if !axes.iter().any(|v| dot(*v, u).abs() > 1.0 - 1e-12) {
                        axes.push(u);
                    }
                }
            }
            for a in axes {
                cover.push(ClosedSubgroup::circle(a)?);
            }
        }
        ParentGroup::Torus { dim: 2 } => {
            cover.push(ClosedSubgroup::full_torus(2));
            let reach = (1.0 / delta).ceil().max(1.0) as i64;
            for p in 0..=reach {
                for q in -reach..=reach {
                    if (p == 0 && q <= 0) || gcd(p, q) != 1 {
                        continue;
                    }
                    cover.push(ClosedSubgroup::torus_line(p, q)?);
                }
            }
        }
        ParentGroup::Torus { .. } => {
            return Err(SymError::UnsupportedParent {
                parent: parent.to_string(),
            })
        }
        ParentGroup::BoxTranslations { dim } => {
            for mask in 1..(1u32 << dim) {
                cover.push(ClosedSubgroup::axis_translations(dim, mask)?);
            }
        }
    }
    Ok(cover)
}

/// `δ_n = L_𝒢⁻¹ (φ_n / 2L²)^{1/(2 min(β,1))}` with
/// `φ_n = n^{−2β/(2β + d − d_max)}`.
pub fn delta_schedule(
    n: usize,
    beta: f64,
    d: usize,
    d_max: usize,
    lipschitz: f64,
    group_lipschitz: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    for (name, v) in [("beta", beta), ("L", lipschitz), ("L_G", group_lipschitz)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, "must be positive and finite"));
        }
    }
    let k = d as f64 - d_max as f64;
    if 2.0 * beta + k <= 0.0 {
        return Err(invalid("d_max", "2β + d − d_max must be positive"));
    }
    let phi = (n as f64).powf(-2.0 * beta / (2.0 * beta + k));
    let base = phi / (2.0 * lipschitz * lipschitz);
    Ok(base.powf(1.0 / (2.0 * beta.min(1.0))) / group_lipschitz)
}

/// One subgroup per line, in the catalog text format.
pub fn format_catalog(cover: &[ClosedSubgroup]) -> String {
    let mut s = String::new();
    for g in cover {
        s.push_str(&g.to_string());
        s.push('\n');
    }
    s
}

impl fmt::Display for ClosedSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            SubgroupFamily::Trivial => write!(f, "trivial {}", self.parent),
            SubgroupFamily::Circle3 { axis } => {
                write!(f, "circle3 {:.9} {:.9} {:.9}", axis[0], axis[1], axis[2])
            }
            SubgroupFamily::FullSO3 => write!(f, "so3"),
            SubgroupFamily::TorusLine { p, q } => write!(f, "torus_line {p} {q}"),
            SubgroupFamily::FullTorus { dim } => write!(f, "torus {dim}"),
            SubgroupFamily::AxisTranslations { mask } => {
                let ParentGroup::BoxTranslations { dim } = self.parent else {
                    return write!(f, "axis_translations ? {mask}");
                };
                write!(f, "axis_translations {dim} {mask:0width$b}", width = dim)
            }
        }
    }
}

impl FromStr for ClosedSubgroup {
    type Err = SymError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || invalid("subgroup", format!("cannot parse `{s}`"));
        let num = |i: usize| -> Result<f64> { parts.get(i).ok_or_else(bad)?.parse::<f64>().map_err(|_| bad()) };
        let int = |i: usize| -> Result<i64> { parts.get(i).ok_or_else(bad)?.parse::<i64>().map_err(|_| bad()) };
        match parts.first().copied() {
            Some("trivial") => {
                let parent = match parts.get(1).copied() {
                    Some("SO3") | None => ParentGroup::SO3,
                    Some(p) if p.starts_with('T') => ParentGroup::Torus {
                        dim: p[1..].parse().map_err(|_| bad())?,
                    },
                    Some(p) if p.starts_with('R') => ParentGroup::BoxTranslations {
                        dim: p[1..].parse().map_err(|_| bad())?,
                    },
                    _ => return Err(bad()),
                };
                Ok(ClosedSubgroup::trivial(parent))
            }
            Some("circle3") => ClosedSubgroup::circle([num(1)?, num(2)?, num(3)?]),
            Some("so3") => Ok(ClosedSubgroup::full_so3()),
            Some("torus_line") => ClosedSubgroup::torus_line(int(1)?, int(2)?),
            Some("torus") => Ok(ClosedSubgroup::full_torus(int(1)? as usize)),
            Some("axis_translations") => {
                let dim = int(1)? as usize;
                let mask = u32::from_str_radix(parts.get(2).ok_or_else(bad)?, 2).map_err(|_| bad())?;
                ClosedSubgroup::axis_translations(dim, mask)
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const WHOLE: CompactNeighborhood = CompactNeighborhood::WholeGroup;

    #[test]
    fn orbit_dimensions() {
        assert_eq!(
            ClosedSubgroup::full_so3()
                .orbit_dimension(&CovariateSpace::UnitBall3)
                .unwrap(),
            2
        );
        assert_eq!(
            ClosedSubgroup::trivial(ParentGroup::SO3)
                .orbit_dimension(&CovariateSpace::UnitSphere2)
                .unwrap(),
            0
        );
        let t2 = CovariateSpace::torus(2).unwrap();
        assert_eq!(
            ClosedSubgroup::torus_line(1, 1).unwrap().orbit_dimension(&t2).unwrap(),
            1
        );
        assert!(matches!(
            ClosedSubgroup::full_so3().orbit_dimension(&t2),
            Err(SymError::IncompatibleSubgroup { .. })
        ));
        let b = CovariateSpace::periodic_box(&[1.0, 2.0, 3.0]).unwrap();
        let g = ClosedSubgroup::axis_translations(3, 0b101).unwrap();
        assert_eq!(g.orbit_dimension(&b).unwrap(), 2);
    }

    #[test]
    fn torus_line_validation() {
        assert!(ClosedSubgroup::torus_line(2, 4).is_err());
        assert!(ClosedSubgroup::torus_line(0, 0).is_err());
        assert_eq!(
            ClosedSubgroup::torus_line(-1, 2).unwrap(),
            ClosedSubgroup::torus_line(1, -2).unwrap()
        );
    }

    #[test]
    fn antipodal_axes_coincide() {
        assert_eq!(
            ClosedSubgroup::circle([0.0, 0.0, -2.0]).unwrap(),
            ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn self_distance_is_zero() {
        let g = ClosedSubgroup::circle([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(hausdorff_u_distance(&g, &g, WHOLE, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn trivial_to_circle_is_pi() {
        // brute force: the farthest circle element from the identity is the half turn
        let eps = 0.01;
        let z = ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap();
        let i = ClosedSubgroup::trivial(ParentGroup::SO3);
        let brute = (0..10_000)
            .map(|k| {
                let a = TAU * k as f64 / 10_000.0;
                Rotation::from_axis_angle([0.0, 0.0, 1.0], a).angle()
            })
            .fold(0.0f64, f64::max);
        let d = hausdorff_u_distance(&i, &z, WHOLE, eps).unwrap();
        assert!((d - brute).abs() <= 2.0 * eps, "{d} vs {brute}");
        assert!((d - PI).abs() <= 2.0 * eps);
    }

    #[test]
    fn circle_distance_bound() {
        let u = [0.0, 0.0, 1.0];
        for angle in [0.05f64, 0.2, 0.5, 1.0, 1.4] {
            let v = [angle.sin(), 0.0, angle.cos()];
            let eps = 0.02;
            let d = hausdorff_u_distance(
                &ClosedSubgroup::circle(u).unwrap(),
                &ClosedSubgroup::circle(v).unwrap(),
                WHOLE,
                eps,
            )
            .unwrap();
            assert!(d <= 2.0 * dot(u, v).acos() + 2.0 * eps, "angle {angle}: {d}");
            assert!(d > 0.0);
        }
    }

    #[test]
    fn distance_to_circle_matches_dense_search() {
        let axis = crate::rotation::normalize([0.3, -0.4, 0.8]);
        let r = Rotation::from_axis_angle([1.0, 0.2, 0.1], 2.1);
        let exact = rotation_to_circle(&r, axis);
        let brute = (0..200_000)
            .map(|k| {
                let a = TAU * k as f64 / 200_000.0;
                Rotation::from_axis_angle(axis, a).distance(&r)
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(exact, brute, epsilon = 1e-6);
    }

    #[test]
    fn torus_line_distance_matches_dense_search() {
        let line = ClosedSubgroup::torus_line(2, 3).unwrap();
        let g = GroupElement::torus_shift(&[0.37, 0.81]).unwrap();
        let exact = line.distance_to(&g, WHOLE).unwrap();
        let brute = (0..100_000)
            .map(|k| {
                let t = k as f64 / 100_000.0;
                GroupElement::torus_shift(&[2.0 * t, 3.0 * t])
                    .unwrap()
                    .distance(&g)
                    .unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(exact, brute, epsilon = 1e-4);
    }

    #[test]
    fn so3_net_covers() {
        use crate::sampling::{uniform_rotation, SimRng};
        use rand::SeedableRng;
        let eps = 0.3;
        let net = ClosedSubgroup::full_so3().net(WHOLE, eps).unwrap();
        let mut rng = SimRng::seed_from_u64(3);
        for _ in 0..200 {
            let r = GroupElement::Rotation3(uniform_rotation(&mut rng));
            let best = net
                .iter()
                .map(|g| g.distance(&r).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(best <= eps, "{best}");
        }
    }

    #[test]
    fn nonpositive_resolution_is_error() {
        let g = ClosedSubgroup::full_so3();
        assert!(hausdorff_u_distance(&g, &g, WHOLE, 0.0).is_err());
        assert!(hausdorff_u_distance(&g, &g, WHOLE, -1.0).is_err());
    }

    #[test]
    fn coarse_so3_cover_has_all_strata() {
        let cover = delta_cover(ParentGroup::SO3, &CovariateSpace::UnitBall3, 4.0).unwrap();
        assert!(cover.contains(&ClosedSubgroup::trivial(ParentGroup::SO3)));
        assert!(cover.contains(&ClosedSubgroup::full_so3()));
        assert!(cover
            .iter()
            .any(|g| matches!(g.family(), SubgroupFamily::Circle3 { .. })));
    }

    #[test]
    fn torus_cover_contains_axis_and_diagonal_lines() {
        let t2 = CovariateSpace::torus(2).unwrap();
        let cover = delta_cover(ParentGroup::Torus { dim: 2 }, &t2, 0.5).unwrap();
        for (p, q) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
            assert!(cover.contains(&ClosedSubgroup::torus_line(p, q).unwrap()), "({p},{q})");
        }
        assert!(cover.contains(&ClosedSubgroup::full_torus(2)));
        let strata: std::collections::BTreeSet<usize> = cover.iter().map(|g| g.orbit_dimension(&t2).unwrap()).collect();
        assert_eq!(strata.into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn unsupported_parent() {
        let t3 = CovariateSpace::torus(3).unwrap();
        assert!(matches!(
            delta_cover(ParentGroup::Torus { dim: 3 }, &t3, 0.5),
            Err(SymError::UnsupportedParent { .. })
        ));
        assert!(delta_cover(ParentGroup::SO3, &t3, 0.5).is_err());
    }

    #[test]
    fn schedule_values() {
        assert_abs_diff_eq!(
            delta_schedule(1, 1.0, 3, 2, 1.0, 1.0).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            delta_schedule(1000, 1.0, 3, 2, 1.0, 1.0).unwrap(),
            (1000f64.powf(-2.0 / 3.0) / 2.0).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!((1000f64.powf(-2.0 / 3.0) / 2.0).sqrt(), 0.07071, epsilon = 1e-5);
        let a = delta_schedule(500, 0.7, 3, 2, 1.0, 1.0).unwrap();
        let b = delta_schedule(500, 0.7, 3, 2, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(b / a, 4f64.powf(-1.0 / 1.4), epsilon = 1e-12);
        let a = delta_schedule(500, 1.0, 3, 2, 1.0, 1.0).unwrap();
        let b = delta_schedule(500, 1.0, 3, 2, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(b / a, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn catalog_round_trip() {
        let t2 = CovariateSpace::torus(2).unwrap();
        let cover = delta_cover(ParentGroup::Torus { dim: 2 }, &t2, 0.5).unwrap();
        let text = format_catalog(&cover);
        let parsed: Vec<ClosedSubgroup> = text.lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, cover);
    }
}
