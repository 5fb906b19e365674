//! Brute-force references for small instances: exhaustive permutation search
//! for the Gromov-Monge problem and its maximization form, the quadruple-sum
//! Gromov-Wasserstein objective over arbitrary couplings, and a randomized
//! search over the Birkhoff polytope.
//!
//! Nothing here reuses the closed-form solver; these functions are meant to
//! check it.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Largest `n` accepted by the permutation enumerators (9! = 362 880).
pub const MAX_ENUMERATION: usize = 9;

/// Largest `n` accepted by [`coupling_search`].
pub const MAX_COUPLING_SEARCH: usize = 6;

/// Tolerance on coupling marginals.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Nonnegative `n × m` matrix with uniform marginals `1/n` and `1/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Coupling {
    pub fn new(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(v) = data.iter().find(|v| **v < 0.0) {
            return Err(Error::Marginal(format!("negative entry {v}")));
        }
        let (rt, ct) = (1.0 / rows as f64, 1.0 / cols as f64);
        for i in 0..rows {
            let s: f64 = data[i * cols..(i + 1) * cols].iter().sum();
            if (s - rt).abs() > MARGINAL_TOL {
                return Err(Error::Marginal(format!("row {i} sums to {s}, expected {rt}")));
            }
        }
        for j in 0..cols {
            let s: f64 = (0..rows).map(|i| data[i * cols + j]).sum();
            if (s - ct).abs() > MARGINAL_TOL {
                return Err(Error::Marginal(format!("column {j} sums to {s}, expected {ct}")));
            }
        }
        Ok(Self { data, rows, cols })
    }

    /// The coupling `π_{i,σ(i)} = 1/n`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut data = vec![0.0; n * n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidArgument(format!("permutation entry {j} out of range")));
            }
            data[i * n + j] = 1.0 / n as f64;
        }
        Self::new(data, n, n)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Symmetric matrix of pairwise squared Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    data: Vec<f64>,
    n: usize,
}

impl CostMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.n + k]
    }
}

pub fn cost_matrix(cloud: &PointCloud) -> CostMatrix {
    let n = cloud.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for k in (i + 1)..n {
            let d: f64 = cloud.point(i).iter().zip(cloud.point(k)).map(|(a, b)| (a - b) * (a - b)).sum();
            data[i * n + k] = d;
            data[k * n + i] = d;
        }
    }
    CostMatrix { data, n }
}

/// `Σ_{i,j,k,l} (c_X(i,k) − c_Y(j,l))² π_ij π_kl`, evaluated directly.
pub fn gw_cost(pi: &Coupling, cx: &CostMatrix, cy: &CostMatrix) -> Result<f64> {
    let (n, m) = pi.shape();
    if cx.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: cx.len() });
    }
    if cy.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: cy.len() });
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            let pij = pi.get(i, j);
            if pij == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for k in 0..n {
                for l in 0..m {
                    let d = cx.get(i, k) - cy.get(j, l);
                    inner += d * d * pi.get(k, l);
                }
            }
            total += pij * inner;
        }
    }
    Ok(total)
}

/// `(1/n²) Σ_{i,j} ((x_i − x_j)² − (y_σ(i) − y_σ(j))²)²` for an explicit permutation.
pub fn gm_objective(xs: &[f64], ys: &[f64], perm: &[usize]) -> f64 {
    let n = xs.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dx = xs[i] - xs[j];
            let dy = ys[perm[i]] - ys[perm[j]];
            let d = dx * dx - dy * dy;
            total += d * d;
        }
    }
    total / (n * n) as f64
}

/// `Σ_{i,j} (x_i − x_j)² (y_σ(i) − y_σ(j))²`.
pub fn qap_objective(xs: &[f64], ys: &[f64], perm: &[usize]) -> f64 {
    let n = xs.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dx = xs[i] - xs[j];
            let dy = ys[perm[i]] - ys[perm[j]];
            total += dx * dx * dy * dy;
        }
    }
    total
}

/// Advances `perm` to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Calls `f` on every permutation of `0..n`, in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        f(&perm);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn check_enumerable(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::CountMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::Empty);
    }
    if xs.len() > MAX_ENUMERATION {
        return Err(Error::TooLarge { n: xs.len(), max: MAX_ENUMERATION });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Exhaustive minimum of the Gromov-Monge objective. Ties keep the
/// lexicographically smallest permutation.
pub fn gm_bruteforce(xs: &[f64], ys: &[f64]) -> Result<(f64, Vec<usize>)> {
    check_enumerable(xs, ys)?;
    let mut best = (f64::INFINITY, Vec::new());
    for_each_permutation(xs.len(), |perm| {
        let v = gm_objective(xs, ys, perm);
        if v < best.0 {
            best = (v, perm.to_vec());
        }
    });
    Ok(best)
}

/// Exhaustive maximum of the quadratic assignment objective
/// `Σ (x_i − x_j)² (y_σ(i) − y_σ(j))²`. Ties keep the lexicographically
/// smallest permutation.
pub fn qap_bruteforce(xs: &[f64], ys: &[f64]) -> Result<(f64, Vec<usize>)> {
    check_enumerable(xs, ys)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for_each_permutation(xs.len(), |perm| {
        let v = qap_objective(xs, ys, perm);
        if v > best.0 {
            best = (v, perm.to_vec());
        }
    });
    Ok(best)
}

/// Every permutation whose objective lies within `tol` of the optimum of
/// `objective` (minimum when `maximize` is false).
pub fn optimal_set(
    xs: &[f64],
    ys: &[f64],
    objective: fn(&[f64], &[f64], &[usize]) -> f64,
    maximize: bool,
    tol: f64,
) -> Result<(f64, Vec<Vec<usize>>)> {
    check_enumerable(xs, ys)?;
    let mut values = Vec::new();
    for_each_permutation(xs.len(), |perm| values.push((objective(xs, ys, perm), perm.to_vec())));
    let sign = if maximize { -1.0 } else { 1.0 };
    let best = values.iter().map(|(v, _)| sign * v).fold(f64::INFINITY, f64::min) * sign;
    let set = values
        .into_iter()
        .filter(|(v, _)| (v - best).abs() <= tol)
        .map(|(_, p)| p)
        .collect();
    Ok((best, set))
}

/// Scales a positive matrix to a doubly stochastic one by alternating row and
/// column normalization, then divides by `n`.
fn sinkhorn_uniform(mut m: Vec<f64>, n: usize) -> Vec<f64> {
    for _ in 0..10_000 {
        for i in 0..n {
            let s: f64 = m[i * n..(i + 1) * n].iter().sum();
            m[i * n..(i + 1) * n].iter_mut().for_each(|v| *v /= s);
        }
        let mut resid = 0.0f64;
        for j in 0..n {
            let s: f64 = (0..n).map(|i| m[i * n + j]).sum();
            for i in 0..n {
                m[i * n + j] /= s;
            }
            resid = resid.max((s - 1.0).abs());
        }
        if resid < 1e-10 {
            break;
        }
    }
    m.iter_mut().for_each(|v| *v /= n as f64);
    m
}

/// `None` when rounding left a marginal outside tolerance.
fn to_coupling(m: Vec<f64>, n: usize) -> Option<Coupling> {
    Coupling::new(m, n, n).ok()
}

/// Lowest Gromov-Wasserstein cost found among: every permutation coupling,
/// `trials` random doubly stochastic matrices (Sinkhorn-scaled exponentials of
/// Gaussians) and `trials` random convex combinations of permutation
/// couplings, at least one of which is a perturbation of the best permutation.
pub fn coupling_search(xs: &[f64], ys: &[f64], trials: usize, seed: u64) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::CountMismatch { left: xs.len(), right: ys.len() });
    }
    let n = xs.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > MAX_COUPLING_SEARCH {
        return Err(Error::TooLarge { n, max: MAX_COUPLING_SEARCH });
    }
    let cx = cost_matrix(&PointCloud::from_values(xs)?);
    let cy = cost_matrix(&PointCloud::from_values(ys)?);

    let mut perms = Vec::new();
    for_each_permutation(n, |p| perms.push(p.to_vec()));
    let mut best = f64::INFINITY;
    let mut best_perm = 0;
    for (k, p) in perms.iter().enumerate() {
        let c = gw_cost(&Coupling::from_permutation(p)?, &cx, &cy)?;
        if c < best {
            best = c;
            best_perm = k;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let raw: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(&mut rng)).map(f64::exp).collect();
        if let Some(pi) = to_coupling(sinkhorn_uniform(raw, n), n) {
            best = best.min(gw_cost(&pi, &cx, &cy)?);
        }

        // convex combination of a few permutation couplings
        let k = rng.random_range(2..=n.max(2));
        let mut chosen: Vec<&Vec<usize>> = perms.choose_multiple(&mut rng, k).collect();
        if t % 2 == 0 {
            chosen[0] = &perms[best_perm];
        }
        let mut w: Vec<f64> = (0..chosen.len()).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        if t % 2 == 0 {
            // stay close to the best vertex
            let eps = rng.random::<f64>() * 0.1;
            let rest: f64 = w[1..].iter().sum();
            w[0] = (1.0 - eps) * rest / eps.max(1e-12);
        }
        let total: f64 = w.iter().sum();
        let mut m = vec![0.0; n * n];
        for (p, wk) in chosen.iter().zip(&w) {
            for (i, &j) in p.iter().enumerate() {
                m[i * n + j] += wk / total / n as f64;
            }
        }
        if let Some(pi) = to_coupling(m, n) {
            best = best.min(gw_cost(&pi, &cx, &cy)?);
        }
    }
    Ok(best)
}
