//! Brute-force and closed-form checks of the geometric and probabilistic facts
//! the estimators rely on.
//!
//! Each oracle returns [`OracleReport`]s with `pass ⇔ |observed − expected| ≤ tolerance`.
//! One-sided checks report the excess over their bound as `observed`, clamped
//! at zero, against `expected = 0`.

use std::collections::HashMap;
use std::f64::consts::{SQRT_2, TAU};
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::group::{GroupElement, ParentGroup};
use crate::orbit_grid::{build_orbit_grid, hypercube_side};
use crate::sampling::{derive_rng, label, sample_point, uniform_rotation, unit_vector, Distribution};
use crate::space::{CovariateSpace, Point};
use crate::subgroups::{delta_cover, hausdorff_u_distance, ClosedSubgroup, CompactNeighborhood, SubgroupFamily};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Free-form diagnostics (raw statistics, counts).
    pub detail: String,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64, detail: String) -> Self {
        OracleReport {
            name: name.into(),
            observed,
            expected,
            tolerance,
            pass: (observed - expected).abs() <= tolerance,
            detail,
        }
    }
}

pub const CSV_HEADER: &str = "name,observed,expected,tolerance,pass,detail";

pub fn reports_csv(reports: &[OracleReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},\"{}\"",
            r.name,
            r.observed,
            r.expected,
            r.tolerance,
            r.pass,
            r.detail.replace('"', "'")
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseMomentCase {
    /// `E[(√2‖X‖)⁻²]` for standard Gaussian `X` in ℝ³ (the SO(3) orbit side).
    GaussianSo3,
    /// `E‖X‖⁻²` for `X` uniform in the unit ball.
    UniformBall,
    /// `E[(1 − ⟨X, u⟩)^{−1/2}]` for `X` uniform on S².
    SphereCircle,
}

impl InverseMomentCase {
    pub const ALL: [InverseMomentCase; 3] = [
        InverseMomentCase::GaussianSo3,
        InverseMomentCase::UniformBall,
        InverseMomentCase::SphereCircle,
    ];

    pub fn expected(self) -> f64 {
        match self {
            InverseMomentCase::GaussianSo3 => 0.5,
            InverseMomentCase::UniformBall => 3.0,
            InverseMomentCase::SphereCircle => SQRT_2,
        }
    }

    /// These moments have infinite variance, so the tolerances are fixed.
    pub fn tolerance(self) -> f64 {
        match self {
            InverseMomentCase::GaussianSo3 => 0.02,
            InverseMomentCase::UniformBall => 0.05,
            InverseMomentCase::SphereCircle => 0.02,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InverseMomentCase::GaussianSo3 => "inverse_moment_gaussian_so3",
            InverseMomentCase::UniformBall => "inverse_moment_uniform_ball",
            InverseMomentCase::SphereCircle => "inverse_moment_sphere_circle",
        }
    }
}

pub fn inverse_moment_oracle<R: Rng + ?Sized>(
    case: InverseMomentCase,
    samples: usize,
    rng: &mut R,
) -> Result<OracleReport> {
    let u = [0.0, 0.0, 1.0];
    let mut acc = 0.0;
    for _ in 0..samples {
        acc += match case {
            InverseMomentCase::GaussianSo3 => {
                let x = sample_point(&CovariateSpace::UnitBall3, Distribution::Gaussian3, rng)?;
                let r = SQRT_2 * x.norm();
                1.0 / (r * r)
            }
            InverseMomentCase::UniformBall => {
                let x = sample_point(&CovariateSpace::UnitBall3, Distribution::UniformSpace, rng)?;
                1.0 / x.norm().powi(2)
            }
            InverseMomentCase::SphereCircle => {
                let x = unit_vector(rng);
                let t = x[0] * u[0] + x[1] * u[1] + x[2] * u[2];
                1.0 / (1.0 - t).sqrt()
            }
        };
    }
    let mean = acc / samples as f64;
    Ok(OracleReport::new(
        case.name(),
        mean,
        case.expected(),
        case.tolerance(),
        format!("samples={samples}"),
    ))
}

fn random_element<R: Rng + ?Sized>(parent: ParentGroup, rng: &mut R) -> Result<GroupElement> {
    match parent {
        ParentGroup::SO3 => Ok(GroupElement::Rotation3(uniform_rotation(rng))),
        ParentGroup::Torus { dim } => {
            let c: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            GroupElement::torus_shift(&c)
        }
        ParentGroup::BoxTranslations { dim } => {
            let c: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            GroupElement::box_translation(&c)
        }
    }
}

/// `max d(g·x, h·x) / d(g, h)` over random triples. Every 100th pair reuses
/// `g` as `h` to exercise the skip path.
pub fn lipschitz_oracle<R: Rng + ?Sized>(
    space: &CovariateSpace,
    parent: ParentGroup,
    samples: usize,
    rng: &mut R,
) -> Result<OracleReport> {
    let mut max_ratio = 0.0f64;
    let mut skipped = 0usize;
    for i in 0..samples {
        let g = random_element(parent, rng)?;
        let h = if i % 100 == 99 {
            g.clone()
        } else {
            random_element(parent, rng)?
        };
        let x = sample_point(space, Distribution::UniformSpace, rng)?;
        let dg = g.distance(&h)?;
        if g == h || dg == 0.0 {
            skipped += 1;
            continue;
        }
        let dx = space.distance(&g.act(space, &x)?, &h.act(space, &x)?)?;
        max_ratio = max_ratio.max(dx / dg);
    }
    Ok(OracleReport::new(
        format!("lipschitz_{parent}_on_{space}"),
        (max_ratio - 1.0).max(0.0),
        0.0,
        1e-9,
        format!("max_ratio={max_ratio} skipped_equal_pairs={skipped} samples={samples}"),
    ))
}

/// Largest set of points on a circle of radius `r` with pairwise chord at
/// least `2h`, by greedy placement over a fine angle discretisation.
pub fn brute_force_circle_packing(r: f64, h: f64, resolution: usize) -> usize {
    let chord = |a: f64, b: f64| 2.0 * r * ((a - b).abs() / 2.0).sin();
    let mut placed: Vec<f64> = vec![0.0];
    for i in 1..resolution {
        let t = TAU * i as f64 / resolution as f64;
        if placed.iter().all(|p| chord(*p, t) >= 2.0 * h) {
            placed.push(t);
        }
    }
    placed.len()
}

fn random_config<R: Rng + ?Sized>(rng: &mut R) -> Result<(CovariateSpace, ClosedSubgroup, CompactNeighborhood)> {
    let pick = rng.random_range(0..9);
    let space = match pick {
        0..=3 => CovariateSpace::UnitBall3,
        4 | 5 => CovariateSpace::UnitSphere2,
        6 | 7 => CovariateSpace::torus(2)?,
        _ => {
            let sides: Vec<f64> = (0..rng.random_range(1..=3))
                .map(|_| rng.random_range(0.5..4.0))
                .collect();
            CovariateSpace::periodic_box(&sides)?
        }
    };
    let group = match &space {
        CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2 => match rng.random_range(0..3) {
            0 => ClosedSubgroup::trivial(ParentGroup::SO3),
            1 => ClosedSubgroup::circle(unit_vector(rng))?,
            _ => ClosedSubgroup::full_so3(),
        },
        CovariateSpace::Torus { dim } => match rng.random_range(0..3) {
            0 => ClosedSubgroup::trivial(ParentGroup::Torus { dim: *dim }),
            1 => loop {
                let p = rng.random_range(-4i64..=4);
                let q = rng.random_range(-4i64..=4);
                if let Ok(g) = ClosedSubgroup::torus_line(p, q) {
                    break g;
                }
            },
            _ => ClosedSubgroup::full_torus(*dim),
        },
        CovariateSpace::Box { sides } => {
            let d = sides.len();
            ClosedSubgroup::axis_translations(d, rng.random_range(0..(1u32 << d)))?
        }
    };
    let u = match &space {
        CovariateSpace::Box { .. } => CompactNeighborhood::Cube {
            radius: rng.random_range(0.1..2.0),
        },
        _ => CompactNeighborhood::WholeGroup,
    };
    Ok((space, group, u))
}

/// Checks the grid count bound `m ≥ max(1, (R/2h)^{d_G})` and the pairwise
/// spacing `≥ 2h` on random configurations; circle grids are also checked
/// against a brute-force packing count.
pub fn packing_oracle<R: Rng + ?Sized>(configs: usize, rng: &mut R) -> Result<OracleReport> {
    let mut violations = 0usize;
    let mut min_count_slack = f64::INFINITY;
    let mut min_spacing_slack = f64::INFINITY;
    let mut packing_checks = 0usize;
    for _ in 0..configs {
        let (space, group, u) = random_config(rng)?;
        let x = sample_point(&space, Distribution::UniformSpace, rng)?;
        let h = 10f64.powf(rng.random_range(-2.0..0.0));
        let grid = build_orbit_grid(&space, &x, &group, h, u)?;
        let r = hypercube_side(&space, &x, &group, u)?;
        let d_g = if grid.singular {
            0
        } else {
            group.orbit_dimension(&space)?
        };
        let bound = (r / (2.0 * h)).powi(d_g as i32).max(1.0);
        let count_slack = grid.m() as f64 - bound;
        min_count_slack = min_count_slack.min(count_slack);
        let pts = grid.orbit_points(&space)?;
        let mut spacing = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                spacing = spacing.min(space.distance(&pts[i], &pts[j])?);
            }
        }
        if pts.len() > 1 {
            min_spacing_slack = min_spacing_slack.min(spacing - 2.0 * h);
        }
        let mut bad = count_slack < -1e-9 || (pts.len() > 1 && spacing < 2.0 * h - 1e-9);
        if let (SubgroupFamily::Circle3 { axis }, false) = (group.family(), grid.singular) {
            let v = x.vec3();
            let along = v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2];
            let radius = (v.iter().map(|c| c * c).sum::<f64>() - along * along).max(0.0).sqrt();
            if radius > 1e-6 {
                packing_checks += 1;
                bad |= grid.m() > brute_force_circle_packing(radius, h, 20_000);
            }
        }
        violations += bad as usize;
    }
    Ok(OracleReport::new(
        "packing",
        violations as f64,
        0.0,
        0.0,
        format!(
            "configs={configs} min_count_slack={min_count_slack} min_spacing_slack={min_spacing_slack} circle_packing_checks={packing_checks}"
        ),
    ))
}

fn f2(x: &Point) -> f64 {
    let c = x.coords();
    (c[1] * c[1] + c[2] * c[2]).sqrt().cos()
}

/// Gap `|grid average of f₂ − f₂(x)|` against `d_Haus(G, S¹_x)` over random
/// points and random cover members (`L = L_𝒢 = 1`, `α = 1`).
pub fn bias_bound_oracle<R: Rng + ?Sized>(samples: usize, delta: f64, eps: f64, rng: &mut R) -> Result<OracleReport> {
    let space = CovariateSpace::UnitBall3;
    let h_group = ClosedSubgroup::circle([1.0, 0.0, 0.0])?;
    let cover = delta_cover(ParentGroup::SO3, &space, delta)?;
    let mut haus: HashMap<usize, f64> = HashMap::new();
    let mut worst = f64::NEG_INFINITY;
    let mut exact_gap = 0.0f64;
    for _ in 0..samples {
        let idx = rng.random_range(0..cover.len());
        let g = &cover[idx];
        let d = match haus.get(&idx) {
            Some(d) => *d,
            None => {
                let d = hausdorff_u_distance(g, &h_group, CompactNeighborhood::WholeGroup, eps)?;
                haus.insert(idx, d);
                d
            }
        };
        let x = sample_point(&space, Distribution::UniformSpace, rng)?;
        let bw = rng.random_range(0.05..0.5);
        let grid = build_orbit_grid(&space, &x, g, bw, CompactNeighborhood::WholeGroup)?;
        let avg = grid.orbit_points(&space)?.iter().map(f2).sum::<f64>() / grid.m() as f64;
        let gap = (avg - f2(&x)).abs();
        worst = worst.max(gap - d);
        if g == &h_group {
            exact_gap = exact_gap.max(gap);
        }
    }
    // the invariant group itself must reproduce f exactly
    let x = sample_point(&space, Distribution::UniformSpace, rng)?;
    let grid = build_orbit_grid(&space, &x, &h_group, 0.05, CompactNeighborhood::WholeGroup)?;
    for p in grid.orbit_points(&space)? {
        exact_gap = exact_gap.max((f2(&p) - f2(&x)).abs());
    }
    let excess = worst.max(0.0);
    let mut report = OracleReport::new(
        "bias_bound",
        excess,
        0.0,
        2.0 * eps,
        format!("samples={samples} delta={delta} eps={eps} max_gap_minus_bound={worst} invariant_gap={exact_gap}"),
    );
    report.pass &= exact_gap <= 1e-12;
    Ok(report)
}

/// Binomial CDF `P(B ≤ k)` by direct summation.
pub fn binomial_cdf(k: usize, n: usize, p: f64) -> f64 {
    let mut total = 0.0;
    let mut coef = 1.0f64;
    for j in 0..=k.min(n) {
        if j > 0 {
            coef *= (n - j + 1) as f64 / j as f64;
        }
        total += coef * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFrequencies {
    /// Fraction of trials with no success.
    pub empty: f64,
    /// Fraction of trials with at most `np/2` successes.
    pub half: f64,
}

/// Simulates `trials` Binomial(n, p) counts as sums of Bernoulli draws.
pub fn tail_frequencies<R: Rng + ?Sized>(n: usize, p: f64, trials: usize, rng: &mut R) -> TailFrequencies {
    let mut empty = 0usize;
    let mut half = 0usize;
    for _ in 0..trials {
        let count = (0..n).filter(|_| rng.random::<f64>() < p).count();
        empty += (count == 0) as usize;
        half += (count as f64 <= n as f64 * p / 2.0) as usize;
    }
    TailFrequencies {
        empty: empty as f64 / trials as f64,
        half: half as f64 / trials as f64,
    }
}

/// Empty-ball and half-count frequencies against `exp(−np)` and `exp(−np/8)`,
/// each allowed three binomial standard errors.
pub fn tail_bound_oracle<R: Rng + ?Sized>(n: usize, p: f64, trials: usize, rng: &mut R) -> Vec<OracleReport> {
    let freq = tail_frequencies(n, p, trials, rng);
    let np = n as f64 * p;
    [
        ("empty", freq.empty, (-np).exp()),
        ("half", freq.half, (-np / 8.0).exp()),
    ]
    .into_iter()
    .map(|(kind, observed, bound)| {
        let b = bound.min(1.0);
        let se = (b * (1.0 - b) / trials as f64).sqrt();
        OracleReport::new(
            format!("tail_{kind}_n{n}_p{p}"),
            (observed - bound).max(0.0),
            0.0,
            3.0 * se,
            format!("frequency={observed} bound={bound} trials={trials}"),
        )
    })
    .collect()
}

/// Settings for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSuite {
    pub seed: u64,
    pub moment_samples: usize,
    pub lipschitz_samples: usize,
    pub packing_configs: usize,
    pub bias_samples: usize,
    pub tail_trials: usize,
}

impl Default for OracleSuite {
    fn default() -> Self {
        OracleSuite {
            seed: 0,
            moment_samples: 1_000_000,
            lipschitz_samples: 100_000,
            packing_configs: 1000,
            bias_samples: 1000,
            tail_trials: 100_000,
        }
    }
}

/// The `(n, p)` grid used by the tail-bound oracle.
pub const TAIL_GRID: [(usize, f64); 5] = [(50, 0.1), (20, 0.3), (100, 0.05), (10, 0.5), (200, 0.02)];

/// Runs every oracle in parallel, each on its own named RNG stream, and
/// returns the reports sorted by name.
pub fn run_all(suite: &OracleSuite) -> Result<Vec<OracleReport>> {
    type Job<'a> = Box<dyn Fn() -> Result<Vec<OracleReport>> + Send + Sync + 'a>;
    let rng = |name: &str| derive_rng(suite.seed, &[label(name)]);
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for case in InverseMomentCase::ALL {
        jobs.push(Box::new(move || {
            Ok(vec![inverse_moment_oracle(
                case,
                suite.moment_samples,
                &mut rng(case.name()),
            )?])
        }));
    }
    jobs.push(Box::new(move || {
        Ok(vec![lipschitz_oracle(
            &CovariateSpace::UnitBall3,
            ParentGroup::SO3,
            suite.lipschitz_samples,
            &mut rng("lipschitz_so3"),
        )?])
    }));
    jobs.push(Box::new(move || {
        Ok(vec![lipschitz_oracle(
            &CovariateSpace::torus(2)?,
            ParentGroup::Torus { dim: 2 },
            suite.lipschitz_samples,
            &mut rng("lipschitz_torus"),
        )?])
    }));
    jobs.push(Box::new(move || {
        Ok(vec![packing_oracle(suite.packing_configs, &mut rng("packing"))?])
    }));
    jobs.push(Box::new(move || {
        Ok(vec![bias_bound_oracle(
            suite.bias_samples,
            0.5,
            0.02,
            &mut rng("bias_bound"),
        )?])
    }));
    for (n, p) in TAIL_GRID {
        jobs.push(Box::new(move || {
            Ok(tail_bound_oracle(
                n,
                p,
                suite.tail_trials,
                &mut rng(&format!("tail_{n}_{p}")),
            ))
        }));
    }
    let mut reports: Vec<OracleReport> = jobs
        .par_iter()
        .map(|job| job())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}
