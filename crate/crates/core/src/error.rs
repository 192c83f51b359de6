use thiserror::Error;

/// Errors raised by the geometric, estimation and selection layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymError {
    #[error("group element {element} cannot act on space {space}")]
    IncompatibleAction { element: String, space: String },

    #[error("quaternion norm {norm} is not 1 (tolerance 1e-12)")]
    NonUnitQuaternion { norm: f64 },

    #[error("group elements have different variants: {left} vs {right}")]
    VariantMismatch { left: String, right: String },

    #[error("points belong to different spaces: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("point {coords:?} is not a member of {space}")]
    NotInSpace { coords: Vec<f64>, space: String },

    #[error("distribution {distribution} is not supported on {space}")]
    UnsupportedDistribution { distribution: String, space: String },

    #[error("subgroup {subgroup} is not compact")]
    NonCompactGroup { subgroup: String },

    #[error("subgroup {subgroup} does not act on {space}")]
    IncompatibleSubgroup { subgroup: String, space: String },

    #[error("parent group {parent} has no cover construction")]
    UnsupportedParent { parent: String },

    #[error("target point is off the orbit (deviation {deviation:e})")]
    OffOrbit { deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("holdout set is empty")]
    EmptyHoldout,

    #[error("dataset needs at least 2 points to split, got {len}")]
    DatasetTooSmall { len: usize },

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {reason}")]
    Io { path: String, reason: String },

    #[error("scenario {scenario} is defined on {expected}, not {actual}")]
    ScenarioSpaceMismatch {
        scenario: String,
        expected: String,
        actual: String,
    },
}

pub type Result<T, E = SymError> = std::result::Result<T, E>;

pub(crate) fn config_error(field: impl Into<String>, reason: impl Into<String>) -> SymError {
    SymError::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

pub(crate) fn io_error(path: &std::path::Path, err: std::io::Error) -> SymError {
    SymError::Io {
        path: path.display().to_string(),
        reason: err.to_string(),
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SymError {
    SymError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
