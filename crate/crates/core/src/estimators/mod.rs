//! Base and symmetrised regression estimators.

mod lce;
mod symmetrise;

pub use lce::{Lce, LceConfig, INDEX_THRESHOLD};
pub use symmetrise::{
    monte_carlo_symmetrised_predict, partial_symmetrised_predict, GridCache, MonteCarloSymmetriser, PartialSymmetriser,
};

use crate::error::{invalid, Result, SymError};
use crate::space::{CovariateSpace, Point};

/// Anything that maps a point to a real prediction.
pub trait Predictor {
    fn predict(&self, x: &Point) -> f64;
}

impl<F: Fn(&Point) -> f64> Predictor for F {
    fn predict(&self, x: &Point) -> f64 {
        self(x)
    }
}

/// A base estimator that can be instantiated at any bandwidth. Each
/// candidate subgroup uses its own bandwidth, so selection needs the family.
pub trait BaseEstimator: Sync {
    fn space(&self) -> &CovariateSpace;

    /// Size of the training set behind the estimator.
    fn train_len(&self) -> usize;

    fn at_bandwidth(&self, h: f64) -> Result<Box<dyn Predictor + Sync + '_>>;
}

impl BaseEstimator for Dataset {
    fn space(&self) -> &CovariateSpace {
        &self.space
    }

    fn train_len(&self) -> usize {
        self.len()
    }

    fn at_bandwidth(&self, h: f64) -> Result<Box<dyn Predictor + Sync + '_>> {
        Ok(Box::new(Lce::fit(self, LceConfig::new(h)?)))
    }
}

/// A fixed predictor posing as a base estimator; the bandwidth is ignored.
pub struct FixedBase<P> {
    pub predictor: P,
    pub space: CovariateSpace,
    pub train_len: usize,
}

impl<P: Predictor + Sync> BaseEstimator for FixedBase<P> {
    fn space(&self) -> &CovariateSpace {
        &self.space
    }

    fn train_len(&self) -> usize {
        self.train_len
    }

    fn at_bandwidth(&self, _h: f64) -> Result<Box<dyn Predictor + Sync + '_>> {
        Ok(Box::new(|x: &Point| self.predictor.predict(x)))
    }
}

/// Paired covariates and responses on a declared space.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    space: CovariateSpace,
    xs: Vec<Point>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(space: CovariateSpace, xs: Vec<Point>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(invalid("ys", format!("{} responses for {} points", ys.len(), xs.len())));
        }
        for x in &xs {
            space.validate(x)?;
        }
        if let Some(y) = ys.iter().find(|y| !y.is_finite()) {
            return Err(invalid("ys", format!("non-finite response {y}")));
        }
        Ok(Dataset { space, xs, ys })
    }

    pub fn empty(space: CovariateSpace) -> Self {
        Dataset {
            space,
            xs: Vec::new(),
            ys: Vec::new(),
        }
    }

    pub fn space(&self) -> &CovariateSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.xs
    }

    pub fn responses(&self) -> &[f64] {
        &self.ys
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> + '_ {
        self.xs.iter().zip(self.ys.iter().copied())
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            space: self.space.clone(),
            xs: indices.iter().map(|i| self.xs[*i].clone()).collect(),
            ys: indices.iter().map(|i| self.ys[*i]).collect(),
        }
    }

    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.space != other.space {
            return Err(SymError::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            });
        }
        let mut out = self.clone();
        out.xs.extend(other.xs.iter().cloned());
        out.ys.extend(other.ys.iter().copied());
        Ok(out)
    }
}

/// `h = a · n^{−1/(2β + d − d_G)}`.
pub fn bandwidth(a: f64, n: usize, beta: f64, d: usize, d_g: usize) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a", "must be positive and finite"));
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid("beta", "must be positive and finite"));
    }
    let k = 2.0 * beta + d as f64 - d_g as f64;
    if k <= 0.0 {
        return Err(invalid("d_G", "2β + d − d_G must be positive"));
    }
    Ok(a * (n as f64).powf(-1.0 / k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bandwidth_values() {
        assert_abs_diff_eq!(bandwidth(1.0, 100, 1.0, 3, 2).unwrap(), 0.21544, epsilon = 1e-5);
        assert_abs_diff_eq!(bandwidth(1.0, 100, 1.0, 3, 0).unwrap(), 0.39811, epsilon = 1e-5);
        assert_abs_diff_eq!(
            bandwidth(2.0, 100, 1.0, 3, 0).unwrap(),
            2.0 * bandwidth(1.0, 100, 1.0, 3, 0).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn bandwidth_rejects_bad_input() {
        assert!(bandwidth(0.0, 100, 1.0, 3, 0).is_err());
        assert!(bandwidth(1.0, 0, 1.0, 3, 0).is_err());
        assert!(bandwidth(1.0, 10, 0.1, 1, 2).is_err());
    }

    #[test]
    fn dataset_checks_membership() {
        let err = Dataset::new(CovariateSpace::UnitBall3, vec![Point::xyz(2.0, 0.0, 0.0)], vec![1.0]);
        assert!(matches!(err, Err(SymError::NotInSpace { .. })));
        let err = Dataset::new(CovariateSpace::UnitBall3, vec![Point::xyz(0.0, 0.0, 0.0)], vec![]);
        assert!(err.is_err());
    }

    #[test]
    fn closures_are_predictors() {
        let f = |x: &Point| x.norm();
        assert_eq!(f.predict(&Point::xyz(3.0, 4.0, 0.0)), 5.0);
    }
}
