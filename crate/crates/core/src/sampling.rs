//! Seeded samplers for covariates and for uniform (Haar) group elements.
//!
//! Normal deviates use the Marsaglia polar method on `Rng::random::<f64>()`
//! draws, one accepted pair per call to [`normal_pair`]. Fixing the transform
//! keeps a seed's output stable across platforms and library versions.

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SymError};
use crate::group::GroupElement;
use crate::rotation::Rotation;
use crate::space::{CovariateSpace, Point};
use crate::subgroups::{ClosedSubgroup, SubgroupFamily};

/// The RNG used everywhere a seed is accepted.
pub type SimRng = ChaCha8Rng;

/// Derives an independent stream from a base seed and a list of labels.
pub fn derive_rng(seed: u64, labels: &[u64]) -> SimRng {
    let mut h = splitmix(seed ^ 0x005E_ED0F_5EED);
    for l in labels {
        h = splitmix(h ^ splitmix(*l));
    }
    SimRng::seed_from_u64(h)
}

/// Stable 64-bit label for a string (FNV-1a).
pub fn label(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Two independent standard normal deviates.
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let k = (-2.0 * s.ln() / s).sqrt();
            return (u * k, v * k);
        }
    }
}

/// One standard normal deviate (the first of a fresh polar pair).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    normal_pair(rng).0
}

fn normal3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let (a, b) = normal_pair(rng);
    let (c, _) = normal_pair(rng);
    [a, b, c]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Uniform with respect to the space's volume measure.
    UniformSpace,
    /// Standard Gaussian on ℝ³; points are not membership-checked.
    Gaussian3,
}

pub fn sample_point<R: Rng + ?Sized>(space: &CovariateSpace, distribution: Distribution, rng: &mut R) -> Result<Point> {
    match (distribution, space) {
        (Distribution::Gaussian3, CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2) => {
            Ok(Point::from(normal3(rng)))
        }
        (Distribution::Gaussian3, _) => Err(SymError::UnsupportedDistribution {
            distribution: "gaussian3".into(),
            space: space.to_string(),
        }),
        (Distribution::UniformSpace, CovariateSpace::UnitBall3) => {
            let dir = unit_vector(rng);
            let r = rng.random::<f64>().cbrt();
            Ok(Point::xyz(dir[0] * r, dir[1] * r, dir[2] * r))
        }
        (Distribution::UniformSpace, CovariateSpace::UnitSphere2) => Ok(Point::from(unit_vector(rng))),
        (Distribution::UniformSpace, CovariateSpace::Torus { dim }) => {
            let c: Vec<f64> = (0..*dim).map(|_| rng.random::<f64>()).collect();
            Point::new(&c)
        }
        (Distribution::UniformSpace, CovariateSpace::Box { sides }) => {
            let c: Vec<f64> = sides.iter().map(|s| rng.random::<f64>() * s).collect();
            Point::new(&c)
        }
    }
}

/// Uniform direction on S² (normalised Gaussian).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = normal3(rng);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Haar-uniform rotation (normalised Gaussian quaternion).
pub fn uniform_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let (a, b) = normal_pair(rng);
        let (c, d) = normal_pair(rng);
        let n2 = a * a + b * b + c * c + d * d;
        if n2 > 1e-24 {
            return Rotation::normalized(a, b, c, d);
        }
    }
}

/// Draws from the normalised Haar measure of a compact subgroup.
pub fn sample_group<R: Rng + ?Sized>(group: &ClosedSubgroup, rng: &mut R) -> Result<GroupElement> {
    match group.family() {
        SubgroupFamily::Trivial => Ok(group.parent().identity()),
        SubgroupFamily::Circle3 { axis } => {
            let angle = rng.random::<f64>() * TAU;
            Ok(GroupElement::Rotation3(Rotation::from_axis_angle(*axis, angle)))
        }
        SubgroupFamily::FullSO3 => Ok(GroupElement::Rotation3(uniform_rotation(rng))),
        SubgroupFamily::TorusLine { p, q } => {
            let t = rng.random::<f64>();
            GroupElement::torus_shift(&[t * *p as f64, t * *q as f64])
        }
        SubgroupFamily::FullTorus { dim } => {
            let c: Vec<f64> = (0..*dim).map(|_| rng.random::<f64>()).collect();
            GroupElement::torus_shift(&c)
        }
        SubgroupFamily::AxisTranslations { .. } => Err(SymError::NonCompactGroup {
            subgroup: group.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ParentGroup;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_inverse_norm_mean() {
        // E‖X‖⁻¹ = √(2/π) for a standard Gaussian on ℝ³
        let mut rng = SimRng::seed_from_u64(11);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let p = sample_point(&CovariateSpace::UnitBall3, Distribution::Gaussian3, &mut rng).unwrap();
            acc += 1.0 / p.norm();
        }
        let mean = acc / n as f64;
        assert!((mean - (2.0 / PI).sqrt()).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn uniform_ball_inverse_norm_mean() {
        // E‖X‖⁻¹ = ∫ 3r dr = 3/2
        let mut rng = SimRng::seed_from_u64(12);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let p = sample_point(&CovariateSpace::UnitBall3, Distribution::UniformSpace, &mut rng).unwrap();
            assert!(CovariateSpace::UnitBall3.contains(&p));
            acc += 1.0 / p.norm();
        }
        let mean = acc / n as f64;
        assert!((mean - 1.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn uniform_sphere_is_centred() {
        let mut rng = SimRng::seed_from_u64(13);
        let n = 200_000;
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let p = sample_point(&CovariateSpace::UnitSphere2, Distribution::UniformSpace, &mut rng).unwrap();
            assert!(CovariateSpace::UnitSphere2.contains(&p));
            for (a, c) in acc.iter_mut().zip(p.coords()) {
                *a += c;
            }
        }
        for a in acc {
            assert!((a / n as f64).abs() < 0.01);
        }
    }

    #[test]
    fn gaussian_on_torus_is_rejected() {
        let mut rng = SimRng::seed_from_u64(0);
        let t = CovariateSpace::torus(2).unwrap();
        assert!(matches!(
            sample_point(&t, Distribution::Gaussian3, &mut rng),
            Err(SymError::UnsupportedDistribution { .. })
        ));
    }

    #[test]
    fn trivial_group_samples_identity() {
        let mut rng = SimRng::seed_from_u64(1);
        let g = ClosedSubgroup::trivial(ParentGroup::SO3);
        for _ in 0..10 {
            assert_eq!(sample_group(&g, &mut rng).unwrap(), ParentGroup::SO3.identity());
        }
    }

    #[test]
    fn circle_angle_is_uniform() {
        let mut rng = SimRng::seed_from_u64(2);
        let axis = [0.0, 0.0, 1.0];
        let g = ClosedSubgroup::circle(axis).unwrap();
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let GroupElement::Rotation3(r) = sample_group(&g, &mut rng).unwrap() else {
                panic!("expected rotation")
            };
            // signed angle about +z, mapped to [0, 2π)
            let mut phi = 2.0 * r.vector()[2].atan2(r.scalar());
            if phi < 0.0 {
                phi += TAU;
            }
            acc += phi;
        }
        let mean = acc / n as f64;
        assert!((mean - PI).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn derived_streams_differ() {
        let mut a = derive_rng(7, &[1, 2]);
        let mut b = derive_rng(7, &[2, 1]);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
        let mut c = derive_rng(7, &[1, 2]);
        let mut d = derive_rng(7, &[1, 2]);
        assert_eq!(c.random::<u64>(), d.random::<u64>());
    }
}
