//! Rotation-invariant sliced discrepancies: minimize `SGW_Δ` (or `SW_Δ`) over
//! orthonormal frames `Δ ∈ V_p(R^q)` by Riemannian gradient descent.
//!
//! The sliced objective is piecewise polynomial in `Δ`: once the sort order
//! of every projected cloud and the identity/anti-identity choice of every
//! direction are frozen, each slice cost is a polynomial in the projections
//! `z_i = θᵀΔx_i`. The optimizer differentiates that polynomial exactly,
//! projects onto the tangent space, retracts with QR and backtracks until the
//! true (re-sorted) objective decreases. Assignments are recomputed at every
//! iterate.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cloud::{DirectionSet, PointCloud};
use crate::error::{Error, Result};
use crate::gw1d::{solve_sorted, PermKind};
use crate::sgw::{check_inputs, SgwResult, SliceCost};
use crate::stiefel::{project_tangent, pull_back, retract, StiefelFrame};

#[derive(Debug, Clone, PartialEq)]
pub struct RisgwConfig {
    pub max_iters: usize,
    /// Upper bound on the first trial step of each line search, measured along
    /// the unit-norm Riemannian descent direction.
    pub step0: f64,
    pub backtrack_factor: f64,
    pub rel_tol: f64,
    pub max_backtracks: usize,
    /// Extra descents started from random frames; the best result is kept.
    pub restarts: usize,
    pub restart_seed: u64,
}

impl Default for RisgwConfig {
    fn default() -> Self {
        Self {
            max_iters: 30,
            step0: 1.0,
            backtrack_factor: 0.5,
            rel_tol: 1e-6,
            max_backtracks: 20,
            restarts: 0,
            restart_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptTrace {
    /// Objective at the starting frame followed by the objective after every
    /// accepted step; nonincreasing.
    pub objective_per_iter: Vec<f64>,
    pub final_frame: StiefelFrame,
    /// Accepted steps.
    pub iters: usize,
    pub converged: bool,
}

/// Frozen combinatorial state of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceAssignment {
    /// Indices of `mu` in ascending order of projection.
    pub mu_order: Vec<usize>,
    /// Indices of `nu` in ascending order of projection.
    pub nu_order: Vec<usize>,
    pub kind: PermKind,
}

impl SliceAssignment {
    /// `(i, j)` pairs of matched point indices.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.mu_order.len();
        self.mu_order
            .iter()
            .enumerate()
            .map(move |(k, &i)| (i, self.nu_order[self.kind.partner(k, n)]))
    }
}

fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    idx
}

fn evaluate_slice(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    theta: &[f64],
    cost: SliceCost,
) -> (f64, SliceAssignment) {
    let z = mu.dot_all(&pull_back(frame, theta));
    let w = nu.dot_all(theta);
    let mu_order = argsort(&z);
    let nu_order = argsort(&w);
    let a: Vec<f64> = mu_order.iter().map(|&i| z[i]).collect();
    let b: Vec<f64> = nu_order.iter().map(|&j| w[j]).collect();
    let (value, kind) = match cost {
        SliceCost::Gw => {
            let s = solve_sorted(&a, &b);
            (s.cost, s.kind)
        }
        SliceCost::W2 => {
            let n = a.len() as f64;
            (a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n, PermKind::Identity)
        }
    };
    (value, SliceAssignment { mu_order, nu_order, kind })
}

/// Sliced objective at `frame` together with the assignments realizing it.
pub fn fixed_assignments(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    cost: SliceCost,
) -> Result<(SgwResult, Vec<SliceAssignment>)> {
    check_inputs(mu, nu, frame, dirs)?;
    Ok(evaluate(mu, nu, frame, dirs, cost))
}

fn evaluate(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    cost: SliceCost,
) -> (SgwResult, Vec<SliceAssignment>) {
    let (costs, assignments): (Vec<f64>, Vec<SliceAssignment>) = (0..dirs.len())
        .into_par_iter()
        .map(|l| evaluate_slice(mu, nu, frame, dirs.direction(l), cost))
        .unzip();
    (SgwResult::from_costs(costs, dirs), assignments)
}

fn check_assignments(mu: &PointCloud, dirs: &DirectionSet, fixed: &[SliceAssignment]) -> Result<()> {
    if fixed.len() != dirs.len() {
        return Err(Error::DimensionMismatch { expected: dirs.len(), got: fixed.len() });
    }
    let n = mu.len();
    if fixed.iter().any(|a| a.mu_order.len() != n || a.nu_order.len() != n) {
        return Err(Error::InvalidArgument("assignment length differs from point count".into()));
    }
    Ok(())
}

/// Matched projections `(a_k, b_k)` of one slice under a frozen assignment.
fn paired(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    theta: &[f64],
    assignment: &SliceAssignment,
) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let z = mu.dot_all(&pull_back(frame, theta));
    let w = nu.dot_all(theta);
    let mut idx = Vec::with_capacity(z.len());
    let mut a = Vec::with_capacity(z.len());
    let mut b = Vec::with_capacity(z.len());
    for (i, j) in assignment.pairs() {
        idx.push(i);
        a.push(z[i]);
        b.push(w[j]);
    }
    (idx, a, b)
}

/// Objective of the frozen-assignment polynomial; equals the sliced objective
/// wherever the assignments are still optimal.
pub fn fixed_objective(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    fixed: &[SliceAssignment],
    cost: SliceCost,
) -> Result<f64> {
    check_inputs(mu, nu, frame, dirs)?;
    check_assignments(mu, dirs, fixed)?;
    let mut total = 0.0;
    for (theta, asg) in dirs.iter().zip(fixed) {
        let (_, a, b) = paired(mu, nu, frame, theta, asg);
        let n = a.len() as f64;
        total += match cost {
            SliceCost::Gw => {
                let mut s = 0.0;
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        let d = (a[i] - a[j]).powi(2) - (b[i] - b[j]).powi(2);
                        s += d * d;
                    }
                }
                s / (n * n)
            }
            SliceCost::W2 => a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n,
        };
    }
    Ok(total / dirs.len() as f64)
}

/// `∂cost/∂a_k` for every matched pair, in `O(n)`.
fn slice_weights(a: &[f64], b: &[f64], cost: SliceCost) -> Vec<f64> {
    let n = a.len() as f64;
    match cost {
        SliceCost::W2 => a.iter().zip(b).map(|(x, y)| 2.0 * (x - y) / n).collect(),
        SliceCost::Gw => {
            // The polynomial depends on differences only, so centered values give the same derivative.
            let ma = a.iter().sum::<f64>() / n;
            let mb = b.iter().sum::<f64>() / n;
            let (mut a1, mut a2, mut a3, mut b1, mut b2, mut p11, mut p12) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for (x, y) in a.iter().zip(b) {
                let (x, y) = (x - ma, y - mb);
                a1 += x;
                a2 += x * x;
                a3 += x * x * x;
                b1 += y;
                b2 += y * y;
                p11 += x * y;
                p12 += x * y * y;
            }
            let scale = 8.0 / (n * n);
            a.iter()
                .zip(b)
                .map(|(x, y)| {
                    let (x, y) = (x - ma, y - mb);
                    // Σ_j (a_k − a_j)³ − Σ_j (b_k − b_j)² (a_k − a_j)
                    let cubic = n * x * x * x - 3.0 * x * x * a1 + 3.0 * x * a2 - a3;
                    let mixed = y * y * (n * x - a1) - 2.0 * y * (x * b1 - p11) + (x * b2 - p12);
                    scale * (cubic - mixed)
                })
                .collect()
        }
    }
}

fn gradient_impl(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    fixed: &[SliceAssignment],
    cost: SliceCost,
) -> DMatrix<f64> {
    let (q, p) = frame.shape();
    let parts: Vec<DMatrix<f64>> = (0..dirs.len())
        .into_par_iter()
        .map(|l| {
            let theta = dirs.direction(l);
            let (idx, a, b) = paired(mu, nu, frame, theta, &fixed[l]);
            let g = slice_weights(&a, &b, cost);
            // ∂z_i/∂Δ = θ x_iᵀ
            let mut v = vec![0.0; p];
            for (gk, &i) in g.iter().zip(&idx) {
                for (vc, xc) in v.iter_mut().zip(mu.point(i)) {
                    *vc += gk * xc;
                }
            }
            DMatrix::from_fn(q, p, |r, c| theta[r] * v[c])
        })
        .collect();
    let mut total = DMatrix::zeros(q, p);
    for part in &parts {
        total += part;
    }
    total / dirs.len() as f64
}

/// Euclidean gradient of the frozen-assignment SGW objective with respect to
/// the `q × p` matrix `frame`.
pub fn euclidean_gradient(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    fixed: &[SliceAssignment],
) -> Result<DMatrix<f64>> {
    check_inputs(mu, nu, frame, dirs)?;
    check_assignments(mu, dirs, fixed)?;
    Ok(gradient_impl(mu, nu, frame, dirs, fixed, SliceCost::Gw))
}

/// Same as [`euclidean_gradient`] for the sliced squared 2-Wasserstein objective.
pub fn sw_euclidean_gradient(
    mu: &PointCloud,
    nu: &PointCloud,
    frame: &DMatrix<f64>,
    dirs: &DirectionSet,
    fixed: &[SliceAssignment],
) -> Result<DMatrix<f64>> {
    check_inputs(mu, nu, frame, dirs)?;
    check_assignments(mu, dirs, fixed)?;
    Ok(gradient_impl(mu, nu, frame, dirs, fixed, SliceCost::W2))
}

fn descend(
    mu: &PointCloud,
    nu: &PointCloud,
    dirs: &DirectionSet,
    cfg: &RisgwConfig,
    start: StiefelFrame,
    cost: SliceCost,
) -> Result<OptTrace> {
    let mut frame = start;
    let (res, mut assignment) = evaluate(mu, nu, frame.matrix(), dirs, cost);
    let mut obj = res.value;
    let mut trace = vec![obj];
    let mut converged = obj == 0.0;

    let mut it = 0;
    while it < cfg.max_iters && !converged {
        it += 1;
        let g = gradient_impl(mu, nu, frame.matrix(), dirs, &assignment, cost);
        let rg = project_tangent(&frame, &g);
        let slope = rg.norm();
        if !slope.is_finite() {
            return Err(Error::NonFinite);
        }
        if slope <= f64::EPSILON * (1.0 + obj) {
            converged = true;
            break;
        }
        let dir = rg / slope;
        let try_step = |eta: f64| -> Result<(StiefelFrame, SgwResult, Vec<SliceAssignment>)> {
            let cand = retract(&(frame.matrix() - &dir * eta))?;
            let (r, a) = evaluate(mu, nu, cand.matrix(), dirs, cost);
            Ok((cand, r, a))
        };

        // Polyak-type first trial: exact for a quadratic with zero minimum.
        let mut eta = cfg.step0.min(2.0 * obj / slope);
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let cand = try_step(eta)?;
            if cand.1.value < obj {
                accepted = Some((eta, cand));
                break;
            }
            eta *= cfg.backtrack_factor;
        }
        let Some((eta, mut best)) = accepted else {
            // no decrease at any trial step: stationary at step resolution
            converged = true;
            break;
        };

        // one quadratic-interpolation refinement along the same direction
        let curv = (best.1.value - obj + slope * eta) / (eta * eta);
        if curv > 0.0 {
            let t = slope / (2.0 * curv);
            if t.is_finite() && (t - eta).abs() > 1e-2 * eta && t <= cfg.step0.max(eta) {
                let refined = try_step(t)?;
                if refined.1.value < best.1.value {
                    best = refined;
                }
            }
        }

        let (cand, r, a) = best;
        let rel = (obj - r.value) / obj;
        frame = cand;
        obj = r.value;
        assignment = a;
        trace.push(obj);
        if rel < cfg.rel_tol || obj == 0.0 {
            converged = true;
        }
    }

    Ok(OptTrace { iters: trace.len() - 1, objective_per_iter: trace, final_frame: frame, converged })
}

fn minimize(
    mu: &PointCloud,
    nu: &PointCloud,
    dirs: &DirectionSet,
    cfg: &RisgwConfig,
    cost: SliceCost,
) -> Result<(f64, OptTrace)> {
    let start = StiefelFrame::default_for(mu.dim(), nu.dim())?;
    check_inputs(mu, nu, start.matrix(), dirs)?;
    if !(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0 && cfg.step0 > 0.0) {
        return Err(Error::InvalidArgument("step0 must be positive and backtrack_factor in (0, 1)".into()));
    }
    let mut best = descend(mu, nu, dirs, cfg, start, cost)?;
    if cfg.restarts > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.restart_seed);
        let (q, p) = (nu.dim(), mu.dim());
        for _ in 0..cfg.restarts {
            let m = DMatrix::from_fn(q, p, |_, _| StandardNormal.sample(&mut rng));
            let trace = descend(mu, nu, dirs, cfg, retract(&m)?, cost)?;
            if last(&trace) < last(&best) {
                best = trace;
            }
        }
    }
    Ok((last(&best), best))
}

fn last(t: &OptTrace) -> f64 {
    *t.objective_per_iter.last().expect("trace holds the initial objective")
}

/// `min_Δ SGW_Δ(μ, ν)` by local descent from the padding (or identity) frame.
///
/// Returns the best objective seen and the optimization trace. The direction
/// set stays fixed across iterations.
pub fn risgw(mu: &PointCloud, nu: &PointCloud, dirs: &DirectionSet, cfg: &RisgwConfig) -> Result<(f64, OptTrace)> {
    minimize(mu, nu, dirs, cfg, SliceCost::Gw)
}

/// `min_Δ SW_Δ(μ, ν)`, with the same optimizer as [`risgw`].
pub fn risw(mu: &PointCloud, nu: &PointCloud, dirs: &DirectionSet, cfg: &RisgwConfig) -> Result<(f64, OptTrace)> {
    minimize(mu, nu, dirs, cfg, SliceCost::W2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::sample_directions;
    use crate::sgw::{sgw, sw_delta};
    use crate::stiefel::orthonormality_error;

    fn gaussian_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * d).map(|_| StandardNormal.sample(&mut rng)).collect();
        PointCloud::new(data, d).unwrap()
    }

    fn rotation(angle: f64) -> DMatrix<f64> {
        let (s, c) = angle.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
    }

    #[test]
    fn identical_clouds_converge_immediately() {
        let mu = gaussian_cloud(20, 2, 1);
        let dirs = sample_directions(10, 2, 0).unwrap();
        let (v, t) = risgw(&mu, &mu, &dirs, &RisgwConfig::default()).unwrap();
        assert_eq!(v, 0.0);
        assert!(t.converged);
        assert_eq!(t.iters, 0);
    }

    #[test]
    fn zero_iterations_return_initial_sgw() {
        let mu = gaussian_cloud(25, 2, 2);
        let nu = gaussian_cloud(25, 3, 3);
        let dirs = sample_directions(15, 3, 4).unwrap();
        let cfg = RisgwConfig { max_iters: 0, ..Default::default() };
        let (v, t) = risgw(&mu, &nu, &dirs, &cfg).unwrap();
        assert_eq!(v, sgw(&mu, &nu, None, &dirs).unwrap().value);
        assert_eq!(t.objective_per_iter.len(), 1);
        let (w, _) = risw(&mu, &nu, &dirs, &cfg).unwrap();
        assert_eq!(w, sw_delta(&mu, &nu, None, &dirs).unwrap().value);
    }

    #[test]
    fn recovers_rotation() {
        let mu = gaussian_cloud(40, 2, 5).mapped(&DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        let nu = mu.mapped(&rotation(0.7)).unwrap();
        let dirs = sample_directions(20, 2, 6).unwrap();
        let before = sgw(&mu, &nu, None, &dirs).unwrap().value;
        let (v, t) = risgw(&mu, &nu, &dirs, &RisgwConfig::default()).unwrap();
        assert!(v < 1e-6 * before, "{v} vs {before}");
        assert!(t.objective_per_iter.windows(2).all(|w| w[1] <= w[0]));
        assert!(orthonormality_error(t.final_frame.matrix()) < 1e-10);
    }

    #[test]
    fn risw_descends() {
        let mu = gaussian_cloud(30, 2, 8);
        let nu = gaussian_cloud(30, 3, 9);
        let dirs = sample_directions(10, 3, 10).unwrap();
        let (v, t) = risw(&mu, &nu, &dirs, &RisgwConfig::default()).unwrap();
        assert!(v <= sw_delta(&mu, &nu, None, &dirs).unwrap().value);
        assert!(t.objective_per_iter.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gradient_of_zero_objective_vanishes() {
        let mu = gaussian_cloud(10, 3, 11);
        let dirs = sample_directions(5, 3, 12).unwrap();
        let id = DMatrix::identity(3, 3);
        let (_, asg) = fixed_assignments(&mu, &mu, &id, &dirs, SliceCost::Gw).unwrap();
        let g = euclidean_gradient(&mu, &mu, &id, &dirs, &asg).unwrap();
        assert!(g.amax() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mu = gaussian_cloud(6, 2, 13);
        let nu = gaussian_cloud(6, 3, 14);
        let dirs = sample_directions(3, 3, 15).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let frame = retract(&DMatrix::from_fn(3, 2, |_, _| StandardNormal.sample(&mut rng))).unwrap();
        let m = frame.matrix().clone();
        for cost in [SliceCost::Gw, SliceCost::W2] {
            let (_, asg) = fixed_assignments(&mu, &nu, &m, &dirs, cost).unwrap();
            let g = gradient_impl(&mu, &nu, &m, &dirs, &asg, cost);
            let h = 1e-5;
            for r in 0..3 {
                for c in 0..2 {
                    let mut plus = m.clone();
                    plus[(r, c)] += h;
                    let mut minus = m.clone();
                    minus[(r, c)] -= h;
                    let fd = (fixed_objective(&mu, &nu, &plus, &dirs, &asg, cost).unwrap()
                        - fixed_objective(&mu, &nu, &minus, &dirs, &asg, cost).unwrap())
                        / (2.0 * h);
                    assert!((fd - g[(r, c)]).abs() <= 1e-5 * (1.0 + g.norm()), "{cost:?} {fd} {}", g[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_config_and_inputs() {
        let mu = gaussian_cloud(5, 2, 1);
        let nu = gaussian_cloud(6, 2, 1);
        let dirs = sample_directions(3, 2, 0).unwrap();
        assert!(matches!(risgw(&mu, &nu, &dirs, &RisgwConfig::default()), Err(Error::CountMismatch { .. })));
        let cfg = RisgwConfig { backtrack_factor: 1.5, ..Default::default() };
        assert!(risgw(&mu, &mu, &dirs, &cfg).is_err());
    }
}
