//! Point clouds with implicit uniform weights, projections onto directions,
//! and seeded sampling of directions on the unit sphere.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::stiefel::StiefelFrame;

/// Norm tolerance accepted by [`project`].
pub const UNIT_TOL: f64 = 1e-9;

/// `n` points in `R^d`, stored row-major. Every point carries weight `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    dim: usize,
}

impl PointCloud {
    /// Builds a cloud from row-major coordinates.
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() {
            return Err(Error::Empty);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = data.len() / dim;
        Ok(Self { data, n, dim })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, dim)
    }

    /// A one-dimensional cloud.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), 1)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Adds `shift` to every point.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: shift.len() });
        }
        let data = self
            .points()
            .flat_map(|x| x.iter().zip(shift).map(|(a, b)| a + b))
            .collect();
        Self::new(data, self.dim)
    }

    /// Applies an arbitrary linear map `x ↦ Mx` (`M` is `k × dim`).
    pub fn mapped(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: m.ncols() });
        }
        let k = m.nrows();
        let mut data = Vec::with_capacity(self.n * k);
        for x in self.points() {
            for r in 0..k {
                data.push((0..self.dim).map(|c| m[(r, c)] * x[c]).sum());
            }
        }
        Self::new(data, k)
    }

    /// Keeps the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.n {
                return Err(Error::InvalidArgument(format!("point index {i} out of range")));
            }
            data.extend_from_slice(self.point(i));
        }
        Self::new(data, self.dim)
    }

    /// Centers the cloud and divides by the root-mean-square point norm.
    /// A cloud collapsed to a single location is only centered.
    pub fn normalized(&self) -> Self {
        let n = self.n as f64;
        let mut mean = vec![0.0; self.dim];
        for x in self.points() {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut data: Vec<f64> = self
            .points()
            .flat_map(|x| x.iter().zip(&mean).map(|(a, m)| a - m))
            .collect();
        let rms = (data.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        if rms > 0.0 {
            data.iter_mut().for_each(|v| *v /= rms);
        }
        Self { data, n: self.n, dim: self.dim }
    }

    /// `⟨x_i, u⟩` for every point, without any check on `u`.
    pub(crate) fn dot_all(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.dim);
        match self.dim {
            1 => self.data.iter().map(|x| x * u[0]).collect(),
            2 => self.data.chunks_exact(2).map(|x| x[0] * u[0] + x[1] * u[1]).collect(),
            3 => self
                .data
                .chunks_exact(3)
                .map(|x| x[0] * u[0] + x[1] * u[1] + x[2] * u[2])
                .collect(),
            _ => self.points().map(|x| x.iter().zip(u).map(|(a, b)| a * b).sum()).collect(),
        }
    }
}

/// `L` unit directions in `R^q`, stored row-major, with the seed they came
/// from (`None` for hand-built sets).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    data: Vec<f64>,
    count: usize,
    dim: usize,
    seed: Option<u64>,
}

impl DirectionSet {
    /// Builds a set from explicit rows; every row must have unit norm within `1e-12`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            let norm = norm(row);
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::NonUnitDirection(norm));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { data, count: rows.len(), dim, seed: None })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn direction(&self, l: usize) -> &[f64] {
        &self.data[l * self.dim..(l + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// `{Mθ : θ ∈ self}` for an orthogonal `M`.
    pub fn mapped(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.dim || m.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: m.ncols() });
        }
        let rows: Vec<Vec<f64>> = self
            .iter()
            .map(|t| (0..self.dim).map(|r| (0..self.dim).map(|c| m[(r, c)] * t[c]).sum()).collect())
            .collect();
        let mut out = Self::from_rows(&rows)?;
        out.seed = self.seed;
        Ok(out)
    }
}

/// Sorted or unsorted projections `⟨x_i, θ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedCloud {
    pub values: Vec<f64>,
    pub sorted: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Embeds a `p`-dimensional cloud in `R^q` by appending `q − p` zero coordinates.
pub fn pad_uplift(cloud: &PointCloud, q: usize) -> Result<PointCloud> {
    let p = cloud.dim();
    if q < p {
        return Err(Error::DimensionMismatch { expected: p, got: q });
    }
    let mut data = Vec::with_capacity(cloud.len() * q);
    for x in cloud.points() {
        data.extend_from_slice(x);
        data.extend(std::iter::repeat_n(0.0, q - p));
    }
    PointCloud::new(data, q)
}

/// Pushes a cloud forward through a frame: point `i` becomes `Δ·x_i`.
pub fn apply_frame(cloud: &PointCloud, frame: &StiefelFrame) -> Result<PointCloud> {
    cloud.mapped(frame.matrix())
}

/// Projects every point onto `direction` (unit norm within `1e-9`),
/// optionally sorting the result ascending.
pub fn project(cloud: &PointCloud, direction: &[f64], sort: bool) -> Result<ProjectedCloud> {
    if direction.len() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), got: direction.len() });
    }
    let nrm = norm(direction);
    if !nrm.is_finite() || (nrm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitDirection(nrm));
    }
    let mut values = cloud.dot_all(direction);
    if sort {
        sort_values(&mut values);
    }
    Ok(ProjectedCloud { values, sorted: sort })
}

/// Ascending sort in `f64::total_cmp` order. Large slices are sorted as
/// order-preserving integer keys, which compares faster; the output is
/// identical either way.
pub(crate) fn sort_values(values: &mut [f64]) {
    if values.len() < KEY_SORT_THRESHOLD {
        values.sort_unstable_by(f64::total_cmp);
        return;
    }
    let mut keys: Vec<u64> = values.iter().map(|&v| order_key(v)).collect();
    keys.sort_unstable();
    for (v, k) in values.iter_mut().zip(keys) {
        *v = from_order_key(k);
    }
}

const KEY_SORT_THRESHOLD: usize = 2048;

#[inline]
fn order_key(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

#[inline]
fn from_order_key(k: u64) -> f64 {
    if k >> 63 == 1 {
        f64::from_bits(k & !(1 << 63))
    } else {
        f64::from_bits(!k)
    }
}

/// Draws `count` directions uniformly on the sphere `S^{q−1}`.
///
/// The stream is fully determined by `seed`: a `ChaCha8Rng` is seeded with
/// `ChaCha8Rng::seed_from_u64(seed)`, and each direction is `q` consecutive
/// standard normal draws (`rand_distr::StandardNormal`) divided by their
/// Euclidean norm. Vectors with norm below `1e-12` are discarded and redrawn.
pub fn sample_directions(count: usize, q: usize, seed: u64) -> Result<DirectionSet> {
    if count == 0 || q == 0 {
        return Err(Error::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(count * q);
    let mut buf = vec![0.0; q];
    for _ in 0..count {
        loop {
            buf.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut rng));
            let nrm = norm(&buf);
            if nrm >= 1e-12 {
                data.extend(buf.iter().map(|v| v / nrm));
                break;
            }
        }
    }
    Ok(DirectionSet { data, count, dim: q, seed: Some(seed) })
}
