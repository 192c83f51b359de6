//! Orbit-grid and Monte Carlo symmetrisation of a base predictor.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;

use crate::error::{invalid, Result};
use crate::estimators::Predictor;
use crate::group::GroupElement;
use crate::orbit_grid::{build_orbit_grid, OrbitGrid};
use crate::sampling::sample_group;
use crate::space::{wrap, CovariateSpace, Point};
use crate::subgroups::{ClosedSubgroup, CompactNeighborhood};

/// `(1/m) Σ_i base(g^i · x)` over the grid elements.
pub fn partial_symmetrised_predict<P: Predictor + ?Sized>(
    base: &P,
    space: &CovariateSpace,
    grid: &OrbitGrid,
    x: &Point,
) -> Result<f64> {
    average(base, space, &grid.elements, x)
}

fn average<P: Predictor + ?Sized>(
    base: &P,
    space: &CovariateSpace,
    elements: &[GroupElement],
    x: &Point,
) -> Result<f64> {
    let mut sum = 0.0;
    for g in elements {
        sum += base.predict(&g.act(space, x)?);
    }
    Ok(sum / elements.len() as f64)
}

/// Mean of `base(g_i · x)` over `m` fresh Haar draws `g_i`.
pub fn monte_carlo_symmetrised_predict<P: Predictor + ?Sized, R: Rng + ?Sized>(
    base: &P,
    space: &CovariateSpace,
    group: &ClosedSubgroup,
    m: usize,
    rng: &mut R,
    x: &Point,
) -> Result<f64> {
    if m == 0 {
        return Err(invalid("M", "must be at least 1"));
    }
    let mut sum = 0.0;
    for _ in 0..m {
        let g = sample_group(group, rng)?;
        sum += base.predict(&g.act(space, x)?);
    }
    Ok(sum / m as f64)
}

/// Orbit grids shared between query points in the same cube of side `step`.
/// Each grid is built at the cube centre (pulled back into the space).
#[derive(Debug)]
pub struct GridCache {
    step: f64,
    grids: RwLock<HashMap<Vec<i64>, Arc<OrbitGrid>>>,
}

impl GridCache {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid("step", "must be positive and finite"));
        }
        Ok(GridCache {
            step,
            grids: RwLock::new(HashMap::new()),
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.grids.read().map(|g| g.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn representative(&self, space: &CovariateSpace, key: &[i64]) -> Result<Point> {
        let mut c: Vec<f64> = key.iter().map(|k| (*k as f64 + 0.5) * self.step).collect();
        match space {
            CovariateSpace::UnitBall3 => {
                let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n > 1.0 {
                    c.iter_mut().for_each(|v| *v /= n);
                }
            }
            CovariateSpace::UnitSphere2 => {
                let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                c.iter_mut().for_each(|v| *v /= n);
            }
            CovariateSpace::Torus { .. } => c.iter_mut().for_each(|v| *v = wrap(*v, 1.0)),
            CovariateSpace::Box { sides } => {
                for (v, s) in c.iter_mut().zip(sides) {
                    *v = wrap(*v, *s);
                }
            }
        }
        Point::new(&c)
    }

    fn get_or_build(
        &self,
        space: &CovariateSpace,
        group: &ClosedSubgroup,
        h: f64,
        u: CompactNeighborhood,
        x: &Point,
    ) -> Result<Arc<OrbitGrid>> {
        let key: Vec<i64> = x.coords().iter().map(|v| (v / self.step).floor() as i64).collect();
        if let Some(g) = self.grids.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(g);
        }
        let rep = self.representative(space, &key)?;
        let grid = Arc::new(build_orbit_grid(space, &rep, group, h, u)?);
        if let Ok(mut m) = self.grids.write() {
            return Ok(m.entry(key).or_insert(grid).clone());
        }
        Ok(grid)
    }
}

/// The partially symmetrised estimator `x ↦ S_{ρ_x} f_n(x)`.
pub struct PartialSymmetriser<P> {
    base: P,
    space: CovariateSpace,
    group: ClosedSubgroup,
    bandwidth: f64,
    neighborhood: CompactNeighborhood,
    cache: Option<GridCache>,
}

impl<P: Predictor> PartialSymmetriser<P> {
    pub fn new(
        base: P,
        space: CovariateSpace,
        group: ClosedSubgroup,
        bandwidth: f64,
        neighborhood: CompactNeighborhood,
    ) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(invalid("h", "bandwidth must be positive and finite"));
        }
        if !group.parent().acts_on(&space) {
            return Err(crate::error::SymError::IncompatibleSubgroup {
                subgroup: group.to_string(),
                space: space.to_string(),
            });
        }
        Ok(PartialSymmetriser {
            base,
            space,
            group,
            bandwidth,
            neighborhood,
            cache: None,
        })
    }

    pub fn with_cache(mut self, step: f64) -> Result<Self> {
        self.cache = Some(GridCache::new(step)?);
        Ok(self)
    }

    pub fn group(&self) -> &ClosedSubgroup {
        &self.group
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn grid_at(&self, x: &Point) -> Result<Arc<OrbitGrid>> {
        match &self.cache {
            Some(c) => c.get_or_build(&self.space, &self.group, self.bandwidth, self.neighborhood, x),
            None => Ok(Arc::new(build_orbit_grid(
                &self.space,
                x,
                &self.group,
                self.bandwidth,
                self.neighborhood,
            )?)),
        }
    }

    pub fn try_predict(&self, x: &Point) -> Result<f64> {
        let grid = self.grid_at(x)?;
        partial_symmetrised_predict(&self.base, &self.space, &grid, x)
    }
}

impl<P: Predictor> Predictor for PartialSymmetriser<P> {
    /// Falls back to the base prediction when no grid can be built at `x`.
    fn predict(&self, x: &Point) -> f64 {
        self.try_predict(x).unwrap_or_else(|_| self.base.predict(x))
    }
}

/// Monte Carlo symmetriser with `M` Haar draws fixed at construction and
/// shared by every query point.
pub struct MonteCarloSymmetriser<P> {
    base: P,
    space: CovariateSpace,
    elements: Vec<GroupElement>,
}

impl<P: Predictor> MonteCarloSymmetriser<P> {
    pub fn new<R: Rng + ?Sized>(
        base: P,
        space: CovariateSpace,
        group: &ClosedSubgroup,
        m: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if m == 0 {
            return Err(invalid("M", "must be at least 1"));
        }
        if !group.parent().acts_on(&space) {
            return Err(crate::error::SymError::IncompatibleSubgroup {
                subgroup: group.to_string(),
                space: space.to_string(),
            });
        }
        let elements = (0..m).map(|_| sample_group(group, rng)).collect::<Result<_>>()?;
        Ok(MonteCarloSymmetriser { base, space, elements })
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }
}

impl<P: Predictor> Predictor for MonteCarloSymmetriser<P> {
    fn predict(&self, x: &Point) -> f64 {
        average(&self.base, &self.space, &self.elements, x).unwrap_or_else(|_| self.base.predict(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{Dataset, Lce, LceConfig};
    use crate::group::ParentGroup;
    use crate::sampling::{sample_point, Distribution, SimRng};
    use crate::subgroups::SubgroupFamily;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use std::f64::consts::TAU;

    const WHOLE: CompactNeighborhood = CompactNeighborhood::WholeGroup;

    fn f1(x: &Point) -> f64 {
        x.norm().cos()
    }

    fn f2(x: &Point) -> f64 {
        let c = x.coords();
        (c[1] * c[1] + c[2] * c[2]).sqrt().cos()
    }

    #[test]
    fn trivial_grid_returns_base() {
        let space = CovariateSpace::UnitBall3;
        let x = Point::xyz(0.1, 0.4, -0.2);
        let g = ClosedSubgroup::trivial(ParentGroup::SO3);
        let grid = build_orbit_grid(&space, &x, &g, 0.1, WHOLE).unwrap();
        let base = |p: &Point| p.coords()[0] * 3.0 + p.coords()[2];
        assert_eq!(partial_symmetrised_predict(&base, &space, &grid, &x).unwrap(), base(&x));
    }

    #[test]
    fn constant_stays_constant() {
        let space = CovariateSpace::UnitBall3;
        let x = Point::xyz(0.3, 0.4, 0.5);
        let grid = build_orbit_grid(&space, &x, &ClosedSubgroup::full_so3(), 0.05, WHOLE).unwrap();
        let c = |_: &Point| 2.75;
        assert_abs_diff_eq!(
            partial_symmetrised_predict(&c, &space, &grid, &x).unwrap(),
            2.75,
            epsilon = 1e-14
        );
    }

    #[test]
    fn invariant_predictor_is_fixed() {
        let space = CovariateSpace::UnitBall3;
        let mut rng = SimRng::seed_from_u64(3);
        let sym = PartialSymmetriser::new(f1, space.clone(), ClosedSubgroup::full_so3(), 0.07, WHOLE).unwrap();
        for _ in 0..200 {
            let x = sample_point(&space, Distribution::UniformSpace, &mut rng).unwrap();
            assert_abs_diff_eq!(sym.predict(&x), f1(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn monte_carlo_trivial_and_invariant() {
        let space = CovariateSpace::UnitBall3;
        let x = Point::xyz(0.2, -0.3, 0.6);
        let mut rng = SimRng::seed_from_u64(4);
        let base = |p: &Point| p.coords()[1];
        let trivial = ClosedSubgroup::trivial(ParentGroup::SO3);
        assert_eq!(
            monte_carlo_symmetrised_predict(&base, &space, &trivial, 1, &mut rng, &x).unwrap(),
            base(&x)
        );
        let sx = ClosedSubgroup::circle([1.0, 0.0, 0.0]).unwrap();
        for seed in 0..20 {
            let mut rng = SimRng::seed_from_u64(seed);
            let v = monte_carlo_symmetrised_predict(&f2, &space, &sx, 17, &mut rng, &x).unwrap();
            assert_abs_diff_eq!(v, f2(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn monte_carlo_matches_quadrature_on_wrong_circle() {
        let space = CovariateSpace::UnitBall3;
        let x = Point::xyz(0.2, -0.3, 0.6);
        let sz = ClosedSubgroup::circle([0.0, 0.0, 1.0]).unwrap();
        let SubgroupFamily::Circle3 { axis } = sz.family() else {
            panic!()
        };
        // midpoint rule over the z-circle
        let k = 20_000;
        let quad = (0..k)
            .map(|i| {
                let t = (i as f64 + 0.5) / k as f64 * TAU;
                let g = GroupElement::Rotation3(crate::rotation::Rotation::from_axis_angle(*axis, t));
                f2(&g.act(&space, &x).unwrap())
            })
            .sum::<f64>()
            / k as f64;
        assert!((quad - f2(&x)).abs() > 1e-3);
        let seeds = 400;
        let vals: Vec<f64> = (0..seeds)
            .map(|s| {
                let mut rng = SimRng::seed_from_u64(1000 + s);
                monte_carlo_symmetrised_predict(&f2, &space, &sz, 10, &mut rng, &x).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / seeds as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (seeds as f64 - 1.0);
        let se = (var / seeds as f64).sqrt();
        assert!((mean - quad).abs() <= 3.0 * se, "mean {mean} quad {quad} se {se}");
    }

    #[test]
    fn monte_carlo_rejects_translations() {
        let b = CovariateSpace::periodic_box(&[2.0, 2.0]).unwrap();
        let g = ClosedSubgroup::axis_translations(2, 1).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        let base = |_: &Point| 0.0;
        assert!(monte_carlo_symmetrised_predict(&base, &b, &g, 5, &mut rng, &Point::xy(0.5, 0.5)).is_err());
        assert!(MonteCarloSymmetriser::new(base, b, &g, 5, &mut rng).is_err());
    }

    #[test]
    fn sup_norm_contraction() {
        let space = CovariateSpace::UnitBall3;
        let mut rng = SimRng::seed_from_u64(21);
        let xs: Vec<Point> = (0..300)
            .map(|_| sample_point(&space, Distribution::UniformSpace, &mut rng).unwrap())
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.coords()[0] * 4.0 - 1.0).collect();
        let data = Dataset::new(space.clone(), xs, ys).unwrap();
        let lce = Lce::fit(&data, LceConfig::new(0.25).unwrap());
        let sym = PartialSymmetriser::new(
            |p: &Point| lce.predict(p),
            space.clone(),
            ClosedSubgroup::full_so3(),
            0.25,
            WHOLE,
        )
        .unwrap();
        for _ in 0..100 {
            let x = sample_point(&space, Distribution::UniformSpace, &mut rng).unwrap();
            let grid = sym.grid_at(&x).unwrap();
            let sup = grid
                .orbit_points(&space)
                .unwrap()
                .iter()
                .map(|p| lce.predict(p).abs())
                .fold(0.0, f64::max);
            assert!(sym.predict(&x).abs() <= sup + 1e-12);
        }
    }

    #[test]
    fn cache_reuses_grids() {
        let space = CovariateSpace::UnitBall3;
        let sym = PartialSymmetriser::new(f1, space.clone(), ClosedSubgroup::full_so3(), 0.1, WHOLE)
            .unwrap()
            .with_cache(0.05)
            .unwrap();
        let a = sym.grid_at(&Point::xyz(0.51, 0.21, 0.01)).unwrap();
        let b = sym.grid_at(&Point::xyz(0.52, 0.22, 0.02)).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_abs_diff_eq!(
            sym.predict(&Point::xyz(0.51, 0.21, 0.01)),
            f1(&Point::xyz(0.51, 0.21, 0.01)),
            epsilon = 1e-12
        );
    }
}
