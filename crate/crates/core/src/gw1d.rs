//! Exact one-dimensional Gromov-Wasserstein with squared-distance costs.
//!
//! For two sorted samples `x` and `y` of equal size `n`, the Gromov-Monge
//! objective
//!
//! ```text
//! (1/n²) Σ_{i,j} ((x_i − x_j)² − (y_σ(i) − y_σ(j))²)²
//! ```
//!
//! is minimized over all permutations by either the identity or the reversal
//! `σ(i) = n + 1 − i`, and for uniform weights the minimum coincides with the
//! Gromov-Wasserstein value over all couplings. Solving therefore costs one
//! sort per sample plus two linear-time cost evaluations.
//!
//! The cost of a fixed pairing `(a_k, b_k)` expands into moments of the two
//! samples:
//!
//! ```text
//! Σ_{i,j} ((a_i − a_j)² − (b_i − b_j)²)²
//!   = 2n Σa⁴ − 8 Σa³ Σa + 6 (Σa²)²
//!   + 2n Σb⁴ − 8 Σb³ Σb + 6 (Σb²)²
//!   − 4 Σa² Σb²
//!   − 4n Σa²b² + 8 (Σa Σab² + Σb Σa²b)
//!   − 8 (Σab)²
//! ```

use crate::error::{Error, Result};

/// Which of the two candidate matchings between sorted samples is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PermKind {
    /// `x_(i) ↔ y_(i)`
    Identity,
    /// `x_(i) ↔ y_(n+1−i)`
    AntiIdentity,
}

impl PermKind {
    /// Index of the partner of sorted position `i` among `n`.
    #[inline]
    pub fn partner(self, i: usize, n: usize) -> usize {
        match self {
            PermKind::Identity => i,
            PermKind::AntiIdentity => n - 1 - i,
        }
    }

    /// The permutation as an explicit index vector.
    pub fn to_permutation(self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.partner(i, n)).collect()
    }
}

/// Result of [`solve_gw1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment1D {
    pub kind: PermKind,
    /// Normalized Gromov-Monge cost (`1/n²` included).
    pub cost: f64,
}

/// Power sums of two paired samples and their cross moments.
///
/// The samples are centered before accumulation; the objective depends only on
/// pairwise differences, and centering keeps the moments small.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub n: usize,
    /// `Σa, Σa², Σa³, Σa⁴`
    pub x: [f64; 4],
    /// `Σb, Σb², Σb³, Σb⁴`
    pub y: [f64; 4],
    /// `Σa²b²`
    pub x2y2: f64,
    /// `Σab²`
    pub x1y2: f64,
    /// `Σa²b`
    pub x2y1: f64,
    /// `Σab`
    pub x1y1: f64,
}

impl MomentSummary {
    /// Moments of `a_i = x_i` and `b_i = y_σ(i)` with `σ` given by `kind`.
    pub fn new(xs: &[f64], ys: &[f64], kind: PermKind) -> Self {
        debug_assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mx = mean(xs);
        let my = mean(ys);
        let mut s = MomentSummary { n, x: [0.0; 4], y: [0.0; 4], x2y2: 0.0, x1y2: 0.0, x2y1: 0.0, x1y1: 0.0 };
        for (i, &xv) in xs.iter().enumerate() {
            let a = xv - mx;
            let b = ys[kind.partner(i, n)] - my;
            let a2 = a * a;
            let b2 = b * b;
            s.x[0] += a;
            s.x[1] += a2;
            s.x[2] += a2 * a;
            s.x[3] += a2 * a2;
            s.y[0] += b;
            s.y[1] += b2;
            s.y[2] += b2 * b;
            s.y[3] += b2 * b2;
            s.x2y2 += a2 * b2;
            s.x1y2 += a * b2;
            s.x2y1 += a2 * b;
            s.x1y1 += a * b;
        }
        s
    }

    /// `Σ_{i,j} ((a_i − a_j)² − (b_i − b_j)²)²`, without normalization.
    ///
    /// Terms are grouped so that each group cancels exactly when `a == b`.
    pub fn raw_cost(&self) -> f64 {
        let n = self.n as f64;
        let [a1, a2, a3, a4] = self.x;
        let [b1, b2, b3, b4] = self.y;
        let quartic = 2.0 * n * ((a4 + b4) - 2.0 * self.x2y2);
        let cubic = -8.0 * ((a3 * a1 + b3 * b1) - (a1 * self.x1y2 + b1 * self.x2y1));
        let quad = 2.0 * (a2 - b2) * (a2 - b2)
            + 4.0 * ((a2 * a2 + b2 * b2) - 2.0 * self.x1y1 * self.x1y1);
        (quartic + cubic + quad).max(0.0)
    }

    /// Normalized cost `raw / n²`.
    pub fn cost(&self) -> f64 {
        let n = self.n as f64;
        self.raw_cost() / (n * n)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::CountMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::Empty);
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_sorted(v: &[f64]) -> Result<()> {
    match v.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(Error::Unsorted(i + 1)),
        None => Ok(()),
    }
}

/// Normalized Gromov-Monge cost of the given matching between two sorted
/// samples, in `O(n)`.
pub fn gm_cost_for_perm(xs: &[f64], ys: &[f64], kind: PermKind) -> Result<f64> {
    check_pair(xs, ys)?;
    check_sorted(xs)?;
    check_sorted(ys)?;
    Ok(MomentSummary::new(xs, ys, kind).cost())
}

/// Same quantity as [`gm_cost_for_perm`] by the direct `O(n²)` double sum.
pub fn gm_cost_naive(xs: &[f64], ys: &[f64], kind: PermKind) -> Result<f64> {
    check_pair(xs, ys)?;
    check_sorted(xs)?;
    check_sorted(ys)?;
    let n = xs.len();
    let mut total = 0.0;
    for i in 0..n {
        let yi = ys[kind.partner(i, n)];
        for j in 0..n {
            let dx = xs[i] - xs[j];
            let dy = yi - ys[kind.partner(j, n)];
            let d = dx * dx - dy * dy;
            total += d * d;
        }
    }
    Ok(total / (n * n) as f64)
}

/// Solves 1D Gromov-Wasserstein between two equally sized samples.
///
/// Both inputs are sorted (copies); ties between the two candidates resolve to
/// [`PermKind::Identity`].
pub fn solve_gw1d(xs: &[f64], ys: &[f64]) -> Result<Assignment1D> {
    check_pair(xs, ys)?;
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(solve_sorted(&a, &b))
}

/// Both inputs already sorted and validated.
#[inline]
pub(crate) fn solve_sorted(a: &[f64], b: &[f64]) -> Assignment1D {
    let id = MomentSummary::new(a, b, PermKind::Identity).cost();
    let anti = MomentSummary::new(a, b, PermKind::AntiIdentity).cost();
    if anti < id {
        Assignment1D { kind: PermKind::AntiIdentity, cost: anti }
    } else {
        Assignment1D { kind: PermKind::Identity, cost: id }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted_uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn identical_inputs_cost_zero() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(gm_cost_for_perm(&x, &x, PermKind::Identity).unwrap(), 0.0);
        assert_eq!(gm_cost_naive(&x, &x, PermKind::Identity).unwrap(), 0.0);
    }

    #[test]
    fn two_point_example() {
        // ordered pairs (1,2) and (2,1) each contribute |1 − 4|² = 9, 18 / 4
        let fast = gm_cost_for_perm(&[0.0, 1.0], &[0.0, 2.0], PermKind::Identity).unwrap();
        let slow = gm_cost_naive(&[0.0, 1.0], &[0.0, 2.0], PermKind::Identity).unwrap();
        assert!((fast - 4.5).abs() < 1e-12);
        assert_eq!(slow, 4.5);
    }

    #[test]
    fn reflection_is_free_under_anti_identity() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [-3.0, -1.0, 0.0];
        assert!(gm_cost_for_perm(&xs, &ys, PermKind::AntiIdentity).unwrap().abs() < 1e-12);
        assert_eq!(gm_cost_naive(&xs, &ys, PermKind::AntiIdentity).unwrap(), 0.0);
    }

    #[test]
    fn single_point_costs_zero() {
        for kind in [PermKind::Identity, PermKind::AntiIdentity] {
            assert_eq!(gm_cost_for_perm(&[3.0], &[-1.0], kind).unwrap(), 0.0);
            assert_eq!(gm_cost_naive(&[3.0], &[-1.0], kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn corrected_cross_term() {
        // x = y = [1, 2]: a cross term of −4(Σx)²(Σy)² instead of −4Σx²Σy² would give a nonzero raw cost
        let s = MomentSummary::new(&[1.0, 2.0], &[1.0, 2.0], PermKind::Identity);
        assert_eq!(s.raw_cost(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            gm_cost_for_perm(&[1.0], &[1.0, 2.0], PermKind::Identity),
            Err(Error::CountMismatch { .. })
        ));
        assert_eq!(gm_cost_for_perm(&[2.0, 1.0], &[1.0, 2.0], PermKind::Identity), Err(Error::Unsorted(1)));
        assert_eq!(gm_cost_naive(&[1.0, 2.0], &[3.0, 1.0], PermKind::Identity), Err(Error::Unsorted(1)));
        assert_eq!(solve_gw1d(&[1.0, f64::NAN], &[1.0, 2.0]), Err(Error::NonFinite));
        assert!(matches!(solve_gw1d(&[1.0], &[]), Err(Error::CountMismatch { .. })));
        assert_eq!(solve_gw1d(&[], &[]), Err(Error::Empty));
    }

    #[test]
    fn solve_examples() {
        let a = solve_gw1d(&[5.0, 1.0, 9.0], &[5.0, 1.0, 9.0]).unwrap();
        assert_eq!(a, Assignment1D { kind: PermKind::Identity, cost: 0.0 });

        let b = solve_gw1d(&[0.0, 1.0, 3.0], &[0.0, 2.0, 3.0]).unwrap();
        assert!(b.cost.abs() < 1e-12);
        assert_eq!(b.kind, PermKind::AntiIdentity);
    }

    #[test]
    fn ties_resolve_to_identity() {
        // symmetric samples: both matchings cost the same
        let a = solve_gw1d(&[-1.0, 0.0, 1.0], &[-2.0, 0.0, 2.0]).unwrap();
        assert_eq!(a.kind, PermKind::Identity);
    }

    #[test]
    fn duplicates_are_allowed() {
        let a = solve_gw1d(&[1.0, 1.0, 2.0, 2.0], &[0.0, 0.0, 0.0, 3.0]).unwrap();
        let x = [1.0, 1.0, 2.0, 2.0];
        let y = [0.0, 0.0, 0.0, 3.0];
        let naive = gm_cost_naive(&x, &y, a.kind).unwrap();
        assert!((a.cost - naive).abs() < 1e-12);
    }

    #[test]
    fn moment_formula_matches_double_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let x = sorted_uniform(&mut rng, 50, -10.0, 10.0);
            let y = sorted_uniform(&mut rng, 50, -10.0, 10.0);
            for kind in [PermKind::Identity, PermKind::AntiIdentity] {
                let fast = gm_cost_for_perm(&x, &y, kind).unwrap();
                let slow = gm_cost_naive(&x, &y, kind).unwrap();
                assert!((fast - slow).abs() <= 1e-9 * (1.0 + slow), "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn moment_summary_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 7, 40] {
            let x = sorted_uniform(&mut rng, n, -5.0, 5.0);
            let y = sorted_uniform(&mut rng, n, -5.0, 5.0);
            let s = MomentSummary::new(&x, &y, PermKind::AntiIdentity);
            assert!(s.x[1] >= 0.0 && s.x[3] >= 0.0);
            assert!(s.x[1] * s.x[1] <= n as f64 * s.x[3] * (1.0 + 1e-12));
            assert!(s.y[1] * s.y[1] <= n as f64 * s.y[3] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn partner_and_permutation() {
        assert_eq!(PermKind::AntiIdentity.to_permutation(4), vec![3, 2, 1, 0]);
        assert_eq!(PermKind::Identity.to_permutation(3), vec![0, 1, 2]);
    }
}
