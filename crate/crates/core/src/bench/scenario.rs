//! Regression scenarios: a space, a parent group and a true regression function.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{config_error, Result, SymError};
use crate::estimators::Dataset;
use crate::group::ParentGroup;
use crate::sampling::{sample_point, standard_normal, Distribution};
use crate::space::{CovariateSpace, Point};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    /// `cos‖x‖` on the unit ball, invariant under SO(3).
    So3F1,
    /// `cos √(x₂² + x₃²)`, invariant under rotations about x.
    So3F2,
    /// `x₁² + x₂ − 0.6 x₃`, no rotational symmetry.
    So3F3,
    /// Constant 1 on the torus.
    T2G1,
    /// `sin(2π x₁)`, invariant along the second axis.
    T2G2,
    /// `cos(2π(x₁ − x₂))`, invariant along the diagonal.
    T2G3,
    /// A user-registered function, see [`Scenario::custom`].
    Custom(String),
}

impl ScenarioId {
    pub const BUILTIN: [ScenarioId; 6] = [
        ScenarioId::So3F1,
        ScenarioId::So3F2,
        ScenarioId::So3F3,
        ScenarioId::T2G1,
        ScenarioId::T2G2,
        ScenarioId::T2G3,
    ];

    pub fn space(&self) -> Option<CovariateSpace> {
        match self {
            ScenarioId::So3F1 | ScenarioId::So3F2 | ScenarioId::So3F3 => Some(CovariateSpace::UnitBall3),
            ScenarioId::T2G1 | ScenarioId::T2G2 | ScenarioId::T2G3 => Some(CovariateSpace::Torus { dim: 2 }),
            ScenarioId::Custom(_) => None,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::So3F1 => write!(f, "so3_f1"),
            ScenarioId::So3F2 => write!(f, "so3_f2"),
            ScenarioId::So3F3 => write!(f, "so3_f3"),
            ScenarioId::T2G1 => write!(f, "t2_g1"),
            ScenarioId::T2G2 => write!(f, "t2_g2"),
            ScenarioId::T2G3 => write!(f, "t2_g3"),
            ScenarioId::Custom(name) => write!(f, "{name}"),
        }
    }
}

impl FromStr for ScenarioId {
    type Err = SymError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "so3_f1" => ScenarioId::So3F1,
            "so3_f2" => ScenarioId::So3F2,
            "so3_f3" => ScenarioId::So3F3,
            "t2_g1" => ScenarioId::T2G1,
            "t2_g2" => ScenarioId::T2G2,
            "t2_g3" => ScenarioId::T2G3,
            other => return Err(config_error("scenario", format!("unknown scenario `{other}`"))),
        })
    }
}

/// Evaluates a built-in scenario's regression function.
pub fn scenario_function(id: &ScenarioId, x: &Point) -> Result<f64> {
    let Some(space) = id.space() else {
        return Err(config_error("scenario", format!("`{id}` has no built-in closed form")));
    };
    if x.dim() != space.ambient_dim() {
        return Err(SymError::ScenarioSpaceMismatch {
            scenario: id.to_string(),
            expected: space.to_string(),
            actual: format!("a {}-dim point", x.dim()),
        });
    }
    let c = x.coords();
    Ok(match id {
        ScenarioId::So3F1 => x.norm().cos(),
        ScenarioId::So3F2 => (c[1] * c[1] + c[2] * c[2]).sqrt().cos(),
        ScenarioId::So3F3 => c[0] * c[0] + c[1] - 0.6 * c[2],
        ScenarioId::T2G1 => 1.0,
        ScenarioId::T2G2 => (TAU * c[0]).sin(),
        ScenarioId::T2G3 => (TAU * (c[0] - c[1])).cos(),
        ScenarioId::Custom(_) => unreachable!("handled above"),
    })
}

pub type RegressionFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// A regression problem: uniform covariates on `space`, truth `f`.
#[derive(Clone)]
pub struct Scenario {
    pub id: ScenarioId,
    pub space: CovariateSpace,
    pub parent: ParentGroup,
    pub f: RegressionFn,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("id", &self.id)
            .field("space", &self.space)
            .field("parent", &self.parent)
            .finish_non_exhaustive()
    }
}

impl Scenario {
    pub fn builtin(id: ScenarioId) -> Result<Self> {
        let space = id
            .space()
            .ok_or_else(|| config_error("scenario", format!("`{id}` is not built in")))?;
        let parent = ParentGroup::for_space(&space);
        let key = id.clone();
        Ok(Scenario {
            id,
            space,
            parent,
            f: Arc::new(move |x| scenario_function(&key, x).unwrap_or(f64::NAN)),
        })
    }

    pub fn custom(name: &str, space: CovariateSpace, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        let parent = ParentGroup::for_space(&space);
        Scenario {
            id: ScenarioId::Custom(name.to_string()),
            space,
            parent,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        (self.f)(x)
    }

    /// `n` pairs `(X, f(X) + σ ε)` with `X` uniform and `ε` standard normal.
    pub fn generate_data<R: Rng + ?Sized>(&self, sigma: f64, n: usize, rng: &mut R) -> Result<Dataset> {
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x = sample_point(&self.space, Distribution::UniformSpace, rng)?;
            let noise = if sigma > 0.0 { sigma * standard_normal(rng) } else { 0.0 };
            ys.push(self.eval(&x) + noise);
            xs.push(x);
        }
        Dataset::new(self.space.clone(), xs, ys)
    }
}

/// Mean squared deviation of `pred` from `truth` over `k` fresh uniform points.
pub fn estimate_risk<R: Rng + ?Sized>(
    pred: &dyn Fn(&Point) -> f64,
    truth: &dyn Fn(&Point) -> f64,
    space: &CovariateSpace,
    k: usize,
    rng: &mut R,
) -> Result<f64> {
    if k == 0 {
        return Err(config_error("eval_points", "must be at least 1"));
    }
    let mut acc = 0.0;
    for _ in 0..k {
        let x = sample_point(space, Distribution::UniformSpace, rng)?;
        acc += (pred(&x) - truth(&x)).powi(2);
    }
    Ok(acc / k as f64)
}
