//! Sliced discrepancies between two clouds of equal size living in possibly
//! different dimensions `p ≤ q`.
//!
//! The smaller cloud is lifted into `R^q` by a frame `Δ`, both clouds are
//! projected onto each direction of a [`DirectionSet`], and the per-direction
//! 1D costs are averaged. [`sgw`] uses the exact 1D Gromov-Wasserstein cost,
//! [`sw_delta`] the squared 2-Wasserstein cost between sorted projections.
//!
//! Per-direction costs are written to an index-addressed buffer and summed in
//! direction order, so results do not depend on the rayon thread count.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::cloud::{sort_values, DirectionSet, PointCloud};
use crate::error::{Error, Result};
use crate::gw1d::solve_sorted;
use crate::stiefel::{pull_back, StiefelFrame};

/// Number of directions used when none is specified.
pub const DEFAULT_DIRECTIONS: usize = 50;

/// The 1D cost averaged over directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceCost {
    /// Gromov-Wasserstein with squared-distance costs (closed form).
    Gw,
    /// Squared 2-Wasserstein.
    W2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgwResult {
    /// Mean of `per_direction`.
    pub value: f64,
    pub per_direction: Vec<f64>,
    pub directions: usize,
    pub seed: Option<u64>,
}

impl SgwResult {
    pub(crate) fn from_costs(per_direction: Vec<f64>, dirs: &DirectionSet) -> Self {
        let value = mean_in_order(&per_direction);
        Self { value, per_direction, directions: dirs.len(), seed: dirs.seed() }
    }
}

fn mean_in_order(v: &[f64]) -> f64 {
    let mut total = 0.0;
    for x in v {
        total += x;
    }
    total / v.len() as f64
}

/// Checks sizes and dimensions; returns `(p, q)`.
pub(crate) fn check_inputs(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
) -> Result<(usize, usize)> {
    if mu.len() != nu.len() {
        return Err(Error::CountMismatch { left: mu.len(), right: nu.len() });
    }
    let (p, q) = (mu.dim(), nu.dim());
    if p > q {
        return Err(Error::DimensionMismatch { expected: q, got: p });
    }
    if frame.nrows() != q || frame.ncols() != p {
        return Err(Error::DimensionMismatch { expected: q * p, got: frame.nrows() * frame.ncols() });
    }
    if dirs.dim() != q {
        return Err(Error::DimensionMismatch { expected: q, got: dirs.dim() });
    }
    Ok((p, q))
}

fn resolve_frame(mu: &PointCloud, nu: &PointCloud, frame: Option<&StiefelFrame>) -> Result<DMatrix<f64>> {
    match frame {
        Some(f) => Ok(f.matrix().clone()),
        None => {
            if mu.dim() > nu.dim() {
                return Err(Error::DimensionMismatch { expected: nu.dim(), got: mu.dim() });
            }
            Ok(StiefelFrame::default_for(mu.dim(), nu.dim())?.into_matrix())
        }
    }
}

/// Cost along one direction. `frame` may be any `q × p` matrix.
pub(crate) fn slice_cost(mu: &PointCloud, nu: &PointCloud, frame: &DMatrix<f64>, theta: &[f64], cost: SliceCost) -> f64 {
    let mut a = mu.dot_all(&pull_back(frame, theta));
    let mut b = nu.dot_all(theta);
    sort_values(&mut a);
    sort_values(&mut b);
    match cost {
        SliceCost::Gw => solve_sorted(&a, &b).cost,
        SliceCost::W2 => {
            let n = a.len() as f64;
            a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n
        }
    }
}

/// Per-direction costs for an arbitrary `q × p` matrix, no validation.
pub(crate) fn slice_costs(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    cost: SliceCost,
) -> Vec<f64> {
    (0..dirs.len())
        .into_par_iter()
        .map(|l| slice_cost(mu, nu, frame, dirs.direction(l), cost))
        .collect()
}

/// Averaged sliced cost for an arbitrary (not necessarily orthonormal) `q × p` matrix.
pub fn sliced_objective(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    cost: SliceCost,
) -> Result<SgwResult> {
    check_inputs(mu, nu, frame, dirs)?;
    Ok(SgwResult::from_costs(slice_costs(mu, nu, frame, dirs, cost), dirs))
}

/// Sliced Gromov-Wasserstein `SGW_Δ(μ, ν)`.
///
/// `mu` lives in `R^p`, `nu` in `R^q` with `p ≤ q`; `frame` defaults to the
/// zero-padding uplift (the identity when `p == q`).
pub fn sgw(mu: &PointCloud, nu: &PointCloud, frame: Option<&StiefelFrame>, dirs: &DirectionSet) -> Result<SgwResult> {
    let m = resolve_frame(mu, nu, frame)?;
    sliced_objective(mu, nu, &m, dirs, SliceCost::Gw)
}

/// Sliced squared 2-Wasserstein through a frame, `SW_Δ(μ, ν)`. Unlike [`sgw`]
/// it is not translation invariant.
pub fn sw_delta(mu: &PointCloud, nu: &PointCloud, frame: Option<&StiefelFrame>, dirs: &DirectionSet) -> Result<SgwResult> {
    let m = resolve_frame(mu, nu, frame)?;
    sliced_objective(mu, nu, &m, dirs, SliceCost::W2)
}
