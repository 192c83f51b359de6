//! Nonparametric regression with learned partial symmetries.
//!
//! A covariate space carries the action of a compact parent group. The crate
//! enumerates a finite cover of candidate closed subgroups, symmetrises a
//! local constant estimator over each candidate, and selects the subgroup
//! with the smallest held-out error, either globally or on a region.

pub mod bench;
pub mod error;
pub mod estimators;
pub mod group;
pub mod oracles;
pub mod orbit_grid;
pub mod rotation;
pub mod sampling;
pub mod selection;
pub mod space;
pub mod subgroups;

pub use error::{Result, SymError};
pub use group::{GroupElement, ParentGroup};
pub use orbit_grid::{build_orbit_grid, hypercube_side, recover_group_element, OrbitGrid};
pub use rotation::Rotation;
pub use sampling::{derive_rng, sample_group, sample_point, Distribution, SimRng};
pub use space::{CovariateSpace, Point};
pub use subgroups::{
    delta_cover, delta_schedule, hausdorff_u_distance, ClosedSubgroup, CompactNeighborhood, SubgroupFamily,
};
