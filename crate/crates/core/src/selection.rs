//! Error-minimising symmetry selection over a cover of candidate subgroups.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result, SymError};
use crate::estimators::{bandwidth, BaseEstimator, Dataset, MonteCarloSymmetriser, PartialSymmetriser, Predictor};
use crate::sampling::{derive_rng, label};
use crate::space::{CovariateSpace, Point};
use crate::subgroups::{ClosedSubgroup, CompactNeighborhood};

/// Errors within this distance of the minimum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Constants of the bandwidth rule `h_G = a · n^{−1/(2β + d − d_G)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRule {
    pub a: f64,
    pub beta: f64,
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule { a: 1.0, beta: 1.0 }
    }
}

impl BandwidthRule {
    pub fn for_group(&self, space: &CovariateSpace, n: usize, group: &ClosedSubgroup) -> Result<f64> {
        bandwidth(
            self.a,
            n,
            self.beta,
            space.intrinsic_dim(),
            group.orbit_dimension(space)?,
        )
    }
}

/// How a candidate subgroup is averaged over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymmetriserMode {
    /// Deterministic orbit grid at the group's bandwidth.
    #[default]
    OrbitGrid,
    /// `draws` Haar samples (default: the training-set size), seeded per group.
    MonteCarlo { draws: Option<usize>, seed: u64 },
}

pub type Region<'a> = &'a (dyn Fn(&Point) -> bool + Sync);

pub struct SelectionInput<'a> {
    pub base: &'a dyn BaseEstimator,
    pub holdout: &'a Dataset,
    pub cover: &'a [ClosedSubgroup],
    pub region: Option<Region<'a>>,
    pub fallback_error: f64,
    pub rule: BandwidthRule,
    /// `None` uses the parent group's default neighbourhood.
    pub neighborhood: Option<CompactNeighborhood>,
    pub mode: SymmetriserMode,
}

impl<'a> SelectionInput<'a> {
    pub fn new(base: &'a dyn BaseEstimator, holdout: &'a Dataset, cover: &'a [ClosedSubgroup]) -> Self {
        SelectionInput {
            base,
            holdout,
            cover,
            region: None,
            fallback_error: 1.0,
            rule: BandwidthRule::default(),
            neighborhood: None,
            mode: SymmetriserMode::OrbitGrid,
        }
    }

    pub fn with_region(mut self, region: Region<'a>) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_rule(mut self, rule: BandwidthRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_mode(mut self, mode: SymmetriserMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_fallback_error(mut self, l: f64) -> Self {
        self.fallback_error = l;
        self
    }

    fn check(&self) -> Result<()> {
        if self.cover.is_empty() {
            return Err(invalid("cover", "must not be empty"));
        }
        if !self.cover.iter().any(ClosedSubgroup::is_trivial) {
            return Err(invalid("cover", "must contain the trivial subgroup"));
        }
        if self.holdout.space() != self.base.space() {
            return Err(SymError::SpaceMismatch {
                left: self.base.space().to_string(),
                right: self.holdout.space().to_string(),
            });
        }
        for g in self.cover {
            g.orbit_dimension(self.base.space())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySelection {
    pub chosen: ClosedSubgroup,
    /// Holdout error of each cover element, in cover order.
    pub per_group_error: Vec<(ClosedSubgroup, f64)>,
    pub used_fallback: bool,
}

impl SymmetrySelection {
    pub fn error_of(&self, group: &ClosedSubgroup) -> Option<f64> {
        self.per_group_error.iter().find(|(g, _)| g == group).map(|(_, e)| *e)
    }

    /// Plain-text report: chosen subgroup, fallback flag, one error line per group.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "chosen: {}", self.chosen);
        let _ = writeln!(out, "fallback: {}", self.used_fallback);
        for (g, e) in &self.per_group_error {
            let _ = writeln!(out, "error {e:.12e} {g}");
        }
        out
    }
}

/// Mean squared residual of `pred` over the holdout set.
pub fn empirical_error<P: Predictor + ?Sized>(pred: &P, holdout: &Dataset) -> Result<f64> {
    if holdout.is_empty() {
        return Err(SymError::EmptyHoldout);
    }
    let sse: f64 = holdout.iter().map(|(x, y)| (pred.predict(x) - y).powi(2)).sum();
    Ok(sse / holdout.len() as f64)
}

/// Base estimator at the group's bandwidth, symmetrised over the group.
pub fn symmetrised_predictor<'b>(
    base: &'b dyn BaseEstimator,
    group: &ClosedSubgroup,
    rule: BandwidthRule,
    neighborhood: Option<CompactNeighborhood>,
    mode: SymmetriserMode,
) -> Result<Box<dyn Predictor + Sync + 'b>> {
    let space = base.space().clone();
    let n = base.train_len().max(1);
    let h = rule.for_group(&space, n, group)?;
    let fitted = base.at_bandwidth(h)?;
    let inner = move |x: &Point| fitted.predict(x);
    if group.is_trivial() {
        return Ok(Box::new(inner));
    }
    let u = neighborhood.unwrap_or_else(|| CompactNeighborhood::default_for(group.parent()));
    Ok(match mode {
        SymmetriserMode::OrbitGrid => Box::new(PartialSymmetriser::new(inner, space, group.clone(), h, u)?),
        SymmetriserMode::MonteCarlo { draws, seed } => {
            let mut rng = derive_rng(seed, &[label(&group.to_string())]);
            Box::new(MonteCarloSymmetriser::new(
                inner,
                space,
                group,
                draws.unwrap_or(n),
                &mut rng,
            )?)
        }
    })
}

fn masked_error<P: Predictor + ?Sized>(pred: &P, holdout: &Dataset, region: Option<Region<'_>>) -> Option<f64> {
    let mut sse = 0.0;
    let mut count = 0usize;
    for (x, y) in holdout.iter() {
        if region.is_none_or(|r| r(x)) {
            sse += (pred.predict(x) - y).powi(2);
            count += 1;
        }
    }
    (count > 0).then(|| sse / count as f64)
}

/// Picks the minimiser: ties within [`TIE_TOLERANCE`] go to the larger orbit
/// dimension, then to the canonically smaller subgroup.
fn argmin(errors: &[(ClosedSubgroup, f64)], space: &CovariateSpace) -> ClosedSubgroup {
    let best = errors.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
    errors
        .iter()
        .filter(|(_, e)| *e <= best + TIE_TOLERANCE)
        .map(|(g, _)| g)
        .min_by(|a, b| {
            let da = a.orbit_dimension(space).unwrap_or(0);
            let db = b.orbit_dimension(space).unwrap_or(0);
            db.cmp(&da).then_with(|| a.canonical_cmp(b))
        })
        .cloned()
        .unwrap_or_else(|| ClosedSubgroup::trivial(crate::group::ParentGroup::for_space(space)))
}

fn select(input: &SelectionInput<'_>, region: Option<Region<'_>>) -> Result<SymmetrySelection> {
    input.check()?;
    let space = input.base.space();
    let inside = input
        .holdout
        .iter()
        .filter(|(x, _)| region.is_none_or(|r| r(x)))
        .count();
    if inside == 0 {
        if region.is_none() {
            return Err(SymError::EmptyHoldout);
        }
        let trivial = input
            .cover
            .iter()
            .find(|g| g.is_trivial())
            .cloned()
            .unwrap_or_else(|| ClosedSubgroup::trivial(crate::group::ParentGroup::for_space(space)));
        return Ok(SymmetrySelection {
            chosen: trivial,
            per_group_error: input.cover.iter().map(|g| (g.clone(), input.fallback_error)).collect(),
            used_fallback: true,
        });
    }
    let per_group_error = input
        .cover
        .par_iter()
        .map(|g| {
            let pred = symmetrised_predictor(input.base, g, input.rule, input.neighborhood, input.mode)?;
            let e = masked_error(&*pred, input.holdout, region).unwrap_or(input.fallback_error);
            Ok((g.clone(), e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetrySelection {
        chosen: argmin(&per_group_error, space),
        per_group_error,
        used_fallback: false,
    })
}

/// Global error-minimising symmetry over the cover.
pub fn global_ems(input: &SelectionInput<'_>) -> Result<SymmetrySelection> {
    if input.region.is_some() {
        return Err(invalid("region", "global selection takes no region; use local_ems"));
    }
    select(input, None)
}

/// Error-minimising symmetry restricted to holdout points in the region
/// (closed membership). Falls back to the trivial group, with error `L` for
/// every candidate, when the region holds no holdout point.
pub fn local_ems(input: &SelectionInput<'_>) -> Result<SymmetrySelection> {
    select(input, input.region)
}

/// The base estimator symmetrised over the selected subgroup.
pub fn best_symmetric<'b>(
    base: &'b dyn BaseEstimator,
    selection: &SymmetrySelection,
    rule: BandwidthRule,
    mode: SymmetriserMode,
) -> Result<Box<dyn Predictor + Sync + 'b>> {
    let mode = if selection.chosen.is_compact() {
        mode
    } else {
        SymmetriserMode::OrbitGrid
    };
    symmetrised_predictor(base, &selection.chosen, rule, None, mode)
}

pub fn best_symmetric_predict(
    base: &dyn BaseEstimator,
    selection: &SymmetrySelection,
    rule: BandwidthRule,
    mode: SymmetriserMode,
    x: &Point,
) -> Result<f64> {
    Ok(best_symmetric(base, selection, rule, mode)?.predict(x))
}

/// Uniformly random partition into halves of sizes `⌊n/2⌋` and `⌈n/2⌉`.
pub fn split_dataset<R: Rng + ?Sized>(full: &Dataset, rng: &mut R) -> Result<(Dataset, Dataset)> {
    if full.len() < 2 {
        return Err(SymError::DatasetTooSmall { len: full.len() });
    }
    let mut idx: Vec<usize> = (0..full.len()).collect();
    idx.shuffle(rng);
    let (a, b) = idx.split_at(full.len() / 2);
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    Ok((full.subset(&a), full.subset(&b)))
}

/// Orders selections by error, for callers that want a ranked table.
pub fn ranked(selection: &SymmetrySelection) -> Vec<(ClosedSubgroup, f64)> {
    let mut out = selection.per_group_error.clone();
    out.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.canonical_cmp(&b.0))
    });
    out
}
