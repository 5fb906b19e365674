//! Orthonormal frames (points of the Stiefel manifold `V_p(R^q)`) and the
//! two pieces of Riemannian geometry the optimizer needs: tangent projection
//! and a QR retraction.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance on `ΔᵀΔ = I` accepted by [`StiefelFrame::new`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A `q × p` matrix with orthonormal columns, `q ≥ p`.
///
/// Applied to a `p`-dimensional point `x` it yields the `q`-dimensional point
/// `Δx`; this is the map that lifts the smaller cloud into the ambient space of
/// the larger one.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelFrame {
    matrix: DMatrix<f64>,
}

impl StiefelFrame {
    /// Validates orthonormality of the columns.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (q, p) = matrix.shape();
        if p == 0 || q == 0 {
            return Err(Error::Empty);
        }
        if p > q {
            return Err(Error::DimensionMismatch { expected: q, got: p });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = orthonormality_error(&matrix);
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: DMatrix::identity(d, d) }
    }

    /// The zero-padding uplift: the first `p` columns of `I_q`.
    pub fn pad(q: usize, p: usize) -> Result<Self> {
        if p > q {
            return Err(Error::DimensionMismatch { expected: q, got: p });
        }
        if p == 0 {
            return Err(Error::Empty);
        }
        Ok(Self { matrix: DMatrix::identity(q, p) })
    }

    /// Identity when `p == q`, padding otherwise.
    pub fn default_for(p: usize, q: usize) -> Result<Self> {
        Self::pad(q, p)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Ambient dimension `q`.
    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Source dimension `p`.
    pub fn source_dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// `Δ·Q` for an orthogonal `p × p` matrix `Q`.
    pub fn compose(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.source_dim() || q.ncols() != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), got: q.nrows() });
        }
        Self::new(&self.matrix * q)
    }

    /// `Δᵀθ`, the direction in source coordinates that gives `⟨Δx, θ⟩ = ⟨x, Δᵀθ⟩`.
    pub fn pull_back(&self, theta: &[f64]) -> Vec<f64> {
        pull_back(&self.matrix, theta)
    }
}

pub(crate) fn pull_back(matrix: &DMatrix<f64>, theta: &[f64]) -> Vec<f64> {
    let (q, p) = matrix.shape();
    debug_assert_eq!(theta.len(), q);
    (0..p)
        .map(|j| {
            let col = matrix.column(j);
            (0..q).map(|i| col[i] * theta[i]).sum()
        })
        .collect()
}

/// Max elementwise deviation of `MᵀM` from the identity.
pub fn orthonormality_error(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    let p = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..p {
        for j in 0..p {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Orthogonal projection of an ambient matrix onto the tangent space at `frame`:
/// `G − Δ·sym(ΔᵀG)`.
pub fn project_tangent(frame: &StiefelFrame, g: &DMatrix<f64>) -> DMatrix<f64> {
    let d = frame.matrix();
    let dtg = d.transpose() * g;
    let sym = (&dtg + dtg.transpose()) * 0.5;
    g - d * sym
}

/// QR retraction: the `Q` factor of `m` with the sign of each column chosen so
/// that `R` has a positive diagonal.
///
/// Fails when the columns of `m` are (numerically) linearly dependent.
pub fn retract(m: &DMatrix<f64>) -> Result<StiefelFrame> {
    let (q, p) = m.shape();
    if p == 0 || q == 0 {
        return Err(Error::Empty);
    }
    if p > q {
        return Err(Error::RankDeficient);
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::RankDeficient);
    }
    let qr = m.clone().qr();
    let r = qr.r();
    let mut qm = qr.q();
    for j in 0..p {
        let rjj = r[(j, j)];
        if rjj.abs() <= 1e-12 * scale * (q as f64) {
            return Err(Error::RankDeficient);
        }
        if rjj < 0.0 {
            qm.column_mut(j).neg_mut();
        }
    }
    Ok(StiefelFrame { matrix: qm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(q: usize, p: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(q, p, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn retract_is_idempotent_on_orthonormal_input() {
        let f = retract(&gaussian(5, 3, 1)).unwrap();
        let g = retract(f.matrix()).unwrap();
        assert!((f.matrix() - g.matrix()).amax() < 1e-12);
    }

    #[test]
    fn retract_removes_scaling() {
        let m = DMatrix::<f64>::identity(3, 3) * 2.0;
        let f = retract(&m).unwrap();
        assert!((f.matrix() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn retract_output_is_orthonormal() {
        for seed in 0..20 {
            let f = retract(&gaussian(3, 2, seed)).unwrap();
            let gram = f.matrix().transpose() * f.matrix();
            assert!((gram - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
        }
    }

    #[test]
    fn retract_spans_same_columns_with_positive_r() {
        let m = gaussian(4, 2, 9);
        let f = retract(&m).unwrap();
        // R = QᵀM must be upper triangular with positive diagonal
        let r = f.matrix().transpose() * &m;
        assert!(r[(0, 0)] > 0.0 && r[(1, 1)] > 0.0);
        assert!(r[(1, 0)].abs() < 1e-12);
    }

    #[test]
    fn retract_rejects_rank_deficient() {
        let mut m = gaussian(3, 2, 4);
        let c0 = m.column(0).clone_owned();
        m.set_column(1, &(c0 * 3.0));
        assert_eq!(retract(&m), Err(Error::RankDeficient));
        assert_eq!(retract(&DMatrix::zeros(3, 2)), Err(Error::RankDeficient));
    }

    #[test]
    fn tangent_projection_is_tangent() {
        let f = retract(&gaussian(4, 2, 3)).unwrap();
        let g = gaussian(4, 2, 5);
        let t = project_tangent(&f, &g);
        let s = f.matrix().transpose() * &t;
        assert!((&s + s.transpose()).amax() < 1e-12);
        // projecting twice changes nothing
        let t2 = project_tangent(&f, &t);
        assert!((t - t2).amax() < 1e-12);
    }

    #[test]
    fn new_validates() {
        assert!(StiefelFrame::new(DMatrix::from_element(2, 2, 1.0)).is_err());
        assert!(StiefelFrame::new(DMatrix::identity(2, 3)).is_err());
        let pad = StiefelFrame::pad(4, 2).unwrap();
        assert_eq!(pad.ambient_dim(), 4);
        assert_eq!(pad.source_dim(), 2);
        assert_eq!(pad.pull_back(&[0.1, 0.2, 0.3, 0.4]), vec![0.1, 0.2]);
    }
}
