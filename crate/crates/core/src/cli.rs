//! Command implementations behind the `slicedgw` binary: `compute`, `spiral`,
//! `bench` and `pairwise`.
//!
//! Every command returns its full output as a string so that it can be tested
//! in-process; the binary only parses flags and writes the result. Exit codes:
//! 0 success, 1 I/O or parse error, 2 input-contract violation.
//!
//! # Spiral generator
//!
//! [`spiral`] draws `n` points of a two-arm spiral. Point `k` belongs to arm
//! `k mod 2`; its parameter `t` is uniform on `[0, 4π]`, its noiseless position
//! is `(t / 4π)·(cos t, sin t)` on arm 0 and the negation of that on arm 1,
//! and independent `N(0, 0.05²)` jitter is added to both coordinates.
//!
//! # Seeds
//!
//! Derived streams (spiral samples, subsampling, per-trial directions) use
//! `ChaCha8Rng::seed_from_u64(derive_seed(seed, tag))`, see [`derive_seed`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{sample_directions, DirectionSet, PointCloud};
use crate::error::Error;
use crate::io::{format_real, load_cloud, LoadError};
use crate::mds::classical_mds;
use crate::risgw::{risgw, risw, RisgwConfig};
use crate::sgw::{sgw, sw_delta};

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;

/// Spiral jitter standard deviation.
pub const SPIRAL_NOISE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }

    pub fn contract(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONTRACT, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::contract(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Sgw,
    Risgw,
    Sw,
    Risw,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Sgw => "sgw",
            Metric::Risgw => "risgw",
            Metric::Sw => "sw",
            Metric::Risw => "risw",
        }
    }
}

/// Outcome of one metric evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub per_direction: Option<Vec<f64>>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
}

/// Evaluates `metric` between `mu` (dimension `p`) and `nu` (dimension `q ≥ p`).
pub fn evaluate_metric(
    mu: &PointCloud,
    nu: &PointCloud,
    metric: Metric,
    dirs: &DirectionSet,
    cfg: &RisgwConfig,
) -> Result<MetricValue, Error> {
    Ok(match metric {
        Metric::Sgw | Metric::Sw => {
            let r = if metric == Metric::Sgw { sgw(mu, nu, None, dirs)? } else { sw_delta(mu, nu, None, dirs)? };
            MetricValue { value: r.value, per_direction: Some(r.per_direction), iterations: None, converged: None }
        }
        Metric::Risgw | Metric::Risw => {
            let (v, t) = if metric == Metric::Risgw { risgw(mu, nu, dirs, cfg)? } else { risw(mu, nu, dirs, cfg)? };
            MetricValue { value: v, per_direction: None, iterations: Some(t.iters), converged: Some(t.converged) }
        }
    })
}

/// SplitMix64 finalizer applied to `seed + tag`, used to derive independent streams.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed.wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform subsample of `k` points without replacement, kept in original order.
pub fn subsample(cloud: &PointCloud, k: usize, seed: u64) -> Result<PointCloud, Error> {
    if k > cloud.len() {
        return Err(Error::InvalidArgument(format!("cannot subsample {k} points from {}", cloud.len())));
    }
    if k == cloud.len() {
        return Ok(cloud.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, cloud.len(), k).into_vec();
    idx.sort_unstable();
    cloud.select(&idx)
}

/// Two-arm noisy spiral in the plane (see the module documentation).
pub fn spiral(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, SPIRAL_NOISE).expect("valid standard deviation");
    let mut data = Vec::with_capacity(2 * n);
    for k in 0..n {
        let t: f64 = rng.random_range(0.0..=4.0 * PI);
        let r = t / (4.0 * PI);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        data.push(sign * r * t.cos() + noise.sample(&mut rng));
        data.push(sign * r * t.sin() + noise.sample(&mut rng));
    }
    PointCloud::new(data, 2).expect("finite spiral coordinates")
}

pub fn rotation2(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

fn gaussian_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    PointCloud::new(data, dim).expect("finite gaussian coordinates")
}

// ---------------------------------------------------------------- compute

#[derive(Debug, Clone, PartialEq)]
pub struct ComputeArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    pub metric: Metric,
    pub directions: usize,
    pub seed: u64,
    /// Subsample both clouds to the smaller size.
    pub subsample: bool,
    /// Explicit common size; implies subsampling.
    pub n: Option<usize>,
    pub normalize: bool,
    pub per_direction: bool,
    /// Include wall-clock time (makes the output run-dependent).
    pub timing: bool,
}

impl ComputeArgs {
    pub fn new(source: impl Into<PathBuf>, target: impl Into<PathBuf>, metric: Metric) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            metric,
            directions: crate::sgw::DEFAULT_DIRECTIONS,
            seed: 0,
            subsample: false,
            n: None,
            normalize: false,
            per_direction: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub metric: Metric,
    pub source: String,
    pub target: String,
    pub seed: u64,
    #[serde(rename = "L")]
    pub directions: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_direction: Option<Vec<f64>>,
}

pub fn compute(args: &ComputeArgs) -> Result<RunReport, CliError> {
    let mut mu = load_cloud(&args.source)?;
    let mut nu = load_cloud(&args.target)?;
    if args.subsample || args.n.is_some() {
        let k = args.n.unwrap_or(mu.len().min(nu.len()));
        mu = subsample(&mu, k, derive_seed(args.seed, 1))?;
        nu = subsample(&nu, k, derive_seed(args.seed, 2))?;
    }
    if mu.len() != nu.len() {
        return Err(CliError::contract(format!(
            "source has {} points and target {}; pass --subsample or --n to compare them",
            mu.len(),
            nu.len()
        )));
    }
    if mu.dim() > nu.dim() {
        return Err(CliError::contract(format!(
            "source dimension {} exceeds target dimension {}; swap the inputs",
            mu.dim(),
            nu.dim()
        )));
    }
    if args.normalize {
        mu = mu.normalized();
        nu = nu.normalized();
    }
    let dirs = sample_directions(args.directions, nu.dim(), args.seed)?;
    let start = Instant::now();
    let out = evaluate_metric(&mu, &nu, args.metric, &dirs, &RisgwConfig::default())?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunReport {
        command: "compute".into(),
        metric: args.metric,
        source: args.source.display().to_string(),
        target: args.target.display().to_string(),
        seed: args.seed,
        directions: args.directions,
        n: mu.len(),
        p: mu.dim(),
        q: nu.dim(),
        value: out.value,
        iterations: out.iterations,
        converged: out.converged,
        elapsed_ms: args.timing.then_some(elapsed),
        per_direction: if args.per_direction { out.per_direction } else { None },
    })
}

/// JSON report followed by a newline.
pub fn cmd_compute(args: &ComputeArgs) -> Result<String, CliError> {
    let report = compute(args)?;
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------- spiral

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralArgs {
    pub n: usize,
    pub directions: usize,
    pub angles: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SpiralArgs {
    fn default() -> Self {
        Self { n: 100, directions: 20, angles: default_angles(), seed: 0, trials: 10 }
    }
}

/// `{0, π/8, …, π}`.
pub fn default_angles() -> Vec<f64> {
    (0..=8).map(|k| k as f64 * PI / 8.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralRow {
    pub angle: f64,
    pub mean_sgw: f64,
    pub mean_risgw: f64,
    pub sgw_p20: f64,
    pub sgw_p80: f64,
    pub risgw_p20: f64,
    pub risgw_p80: f64,
}

/// Linear-interpolation percentile (`q` in `[0, 1]`) of unsorted values.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// SGW (identity frame) and RISGW between a spiral and an independently drawn,
/// rotated spiral, for every angle and trial.
pub fn spiral_curve(args: &SpiralArgs) -> Result<Vec<SpiralRow>, Error> {
    if args.trials == 0 || args.n == 0 || args.directions == 0 {
        return Err(Error::InvalidArgument("n, L and trials must be positive".into()));
    }
    let cfg = RisgwConfig::default();
    // values[trial][angle] = (sgw, risgw)
    let values: Vec<Vec<(f64, f64)>> = (0..args.trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<(f64, f64)>, Error> {
            let base = derive_seed(args.seed, trial);
            let source = spiral(args.n, derive_seed(base, 1));
            let target = spiral(args.n, derive_seed(base, 2));
            let dirs = sample_directions(args.directions, 2, derive_seed(base, 3))?;
            args.angles
                .iter()
                .map(|&angle| {
                    let rotated = target.mapped(&rotation2(angle))?;
                    let s = sgw(&source, &rotated, None, &dirs)?.value;
                    let (r, _) = risgw(&source, &rotated, &dirs, &cfg)?;
                    Ok((s, r))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;

    Ok(args
        .angles
        .iter()
        .enumerate()
        .map(|(k, &angle)| {
            let s: Vec<f64> = values.iter().map(|t| t[k].0).collect();
            let r: Vec<f64> = values.iter().map(|t| t[k].1).collect();
            SpiralRow {
                angle,
                mean_sgw: mean(&s),
                mean_risgw: mean(&r),
                sgw_p20: percentile(&s, 0.2),
                sgw_p80: percentile(&s, 0.8),
                risgw_p20: percentile(&r, 0.2),
                risgw_p80: percentile(&r, 0.8),
            }
        })
        .collect())
}

pub fn cmd_spiral(args: &SpiralArgs) -> Result<String, CliError> {
    let rows = spiral_curve(args)?;
    let mut out = String::from("angle,mean_sgw,mean_risgw,sgw_p20,sgw_p80,risgw_p20,risgw_p80\n");
    for r in rows {
        let cols = [r.angle, r.mean_sgw, r.mean_risgw, r.sgw_p20, r.sgw_p80, r.risgw_p20, r.risgw_p80];
        out.push_str(&cols.map(format_real).join(","));
        out.push('\n');
    }
    Ok(out)
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Clone, PartialEq)]
pub struct BenchArgs {
    pub sizes: Vec<usize>,
    pub directions: usize,
    pub seed: u64,
    /// Maximum timed runs per size; the minimum is reported. Runs stop early
    /// once the accumulated time exceeds a quarter second.
    pub repeats: usize,
}

impl Default for BenchArgs {
    fn default() -> Self {
        Self { sizes: (14..=20).map(|k| 1usize << k).collect(), directions: 50, seed: 0, repeats: 5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub millis: f64,
    pub value: f64,
}

/// Times SGW end to end (projection, sorting, 1D costs) between two 2D
/// Gaussian clouds of each size.
pub fn bench_series(args: &BenchArgs) -> Result<Vec<BenchRow>, Error> {
    let mut rows = Vec::with_capacity(args.sizes.len());
    for &n in &args.sizes {
        if n == 0 {
            return Err(Error::InvalidArgument("sizes must be positive".into()));
        }
        let mu = gaussian_cloud(n, 2, derive_seed(args.seed, 2 * n as u64));
        let nu = gaussian_cloud(n, 2, derive_seed(args.seed, 2 * n as u64 + 1));
        let dirs = sample_directions(args.directions, 2, args.seed)?;
        let mut best = f64::INFINITY;
        let mut spent = 0.0;
        let mut value = 0.0;
        for _ in 0..args.repeats.max(1) {
            let start = Instant::now();
            value = sgw(&mu, &nu, None, &dirs)?.value;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            best = best.min(ms);
            spent += ms;
            if spent > 250.0 {
                break;
            }
        }
        rows.push(BenchRow { n, millis: best, value });
    }
    Ok(rows)
}

/// Least-squares slope of `log(ms)` against `log(n)`.
pub fn loglog_slope(rows: &[BenchRow]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.millis.ln()).collect();
    let (mx, my) = (mean(&xs), mean(&ys));
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String, CliError> {
    let rows = bench_series(args)?;
    let mut out = String::from("n,milliseconds,value\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.n, format_real(r.millis), format_real(r.value)));
    }
    Ok(out)
}

// ---------------------------------------------------------------- pairwise

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseArgs {
    pub dir: PathBuf,
    pub metric: Metric,
    pub directions: usize,
    pub seed: u64,
    /// Common size; defaults to the smallest cloud.
    pub n: Option<usize>,
    pub normalize: bool,
    pub mds: bool,
}

impl PairwiseArgs {
    pub fn new(dir: impl Into<PathBuf>, metric: Metric) -> Self {
        Self {
            dir: dir.into(),
            metric,
            directions: crate::sgw::DEFAULT_DIRECTIONS,
            seed: 0,
            n: None,
            normalize: true,
            mds: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseResult {
    pub names: Vec<String>,
    pub n: usize,
    /// Row-major `k × k`, symmetric, zero diagonal.
    pub matrix: Vec<f64>,
    pub embedding: Option<Vec<Vec<f64>>>,
}

/// `.csv` and `.off` files of a directory, sorted by file name.
pub fn list_cloud_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(format!("cannot read {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(e.to_string()))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("csv") | Some("off")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn pairwise(args: &PairwiseArgs) -> Result<PairwiseResult, CliError> {
    let files = list_cloud_files(&args.dir)?;
    if files.len() < 2 {
        return Err(CliError::contract(format!(
            "{} holds {} cloud file(s); at least 2 are required",
            args.dir.display(),
            files.len()
        )));
    }
    let clouds: Vec<PointCloud> = files.iter().map(|f| load_cloud(f)).collect::<Result<_, _>>()?;
    let smallest = clouds.iter().map(PointCloud::len).min().expect("at least two clouds");
    let n = args.n.unwrap_or(smallest);
    if n == 0 || n > smallest {
        return Err(CliError::contract(format!("cannot subsample to {n} points; the smallest cloud has {smallest}")));
    }
    let clouds: Vec<PointCloud> = clouds
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let c = subsample(c, n, derive_seed(args.seed, 100 + i as u64))?;
            Ok(if args.normalize { c.normalized() } else { c })
        })
        .collect::<Result<_, Error>>()?;

    let k = clouds.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let cfg = RisgwConfig::default();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (mu, nu) = if clouds[i].dim() <= clouds[j].dim() { (&clouds[i], &clouds[j]) } else { (&clouds[j], &clouds[i]) };
            let dirs = sample_directions(args.directions, nu.dim(), args.seed)?;
            Ok(evaluate_metric(mu, nu, args.metric, &dirs, &cfg)?.value)
        })
        .collect::<Result<_, Error>>()?;

    let mut matrix = vec![0.0; k * k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        matrix[i * k + j] = v;
        matrix[j * k + i] = v;
    }
    let embedding = if args.mds { Some(classical_mds(&matrix, k, 2)?) } else { None };
    let names = files
        .iter()
        .map(|f| f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
        .collect();
    Ok(PairwiseResult { names, n, matrix, embedding })
}

/// Distance-matrix CSV and, when requested, the MDS coordinates CSV.
pub fn cmd_pairwise(args: &PairwiseArgs) -> Result<(String, Option<String>), CliError> {
    let res = pairwise(args)?;
    let k = res.names.len();
    let mut out = format!("name,{}\n", res.names.join(","));
    for i in 0..k {
        let row: Vec<String> = res.matrix[i * k..(i + 1) * k].iter().map(|v| format_real(*v)).collect();
        out.push_str(&format!("{},{}\n", res.names[i], row.join(",")));
    }
    let mds = res.embedding.map(|emb| {
        let mut s = String::from("name,x,y\n");
        for (name, c) in res.names.iter().zip(emb) {
            s.push_str(&format!("{name},{},{}\n", format_real(c[0]), format_real(c[1])));
        }
        s
    });
    Ok((out, mds))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 5.0);
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert!((percentile(&v, 0.2) - 1.8).abs() < 1e-12);
    }

    #[test]
    fn spiral_is_deterministic_and_bounded() {
        let a = spiral(100, 3);
        assert_eq!(a, spiral(100, 3));
        assert_ne!(a, spiral(100, 4));
        assert!(a.as_slice().iter().all(|v| v.abs() < 1.5));
    }

    #[test]
    fn subsample_keeps_order_and_size() {
        let c = PointCloud::from_values(&(0..20).map(f64::from).collect::<Vec<_>>()).unwrap();
        let s = subsample(&c, 7, 1).unwrap();
        assert_eq!(s.len(), 7);
        assert!(s.as_slice().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsample(&c, 20, 1).unwrap(), c);
        assert!(subsample(&c, 21, 1).is_err());
    }

    #[test]
    fn derive_seed_separates_streams() {
        assert_ne!(derive_seed(0, 1), derive_seed(0, 2));
        assert_ne!(derive_seed(1, 0), derive_seed(0, 1));
        assert_eq!(derive_seed(5, 9), derive_seed(5, 9));
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let rows: Vec<BenchRow> = [1000usize, 2000, 4000, 8000]
            .iter()
            .map(|&n| BenchRow { n, millis: 0.5 * (n as f64).powf(1.2), value: 0.0 })
            .collect();
        assert!((loglog_slope(&rows) - 1.2).abs() < 1e-12);
    }

    #[test]
    fn spiral_rows_match_angles() {
        let args = SpiralArgs { n: 30, directions: 5, angles: vec![0.0, 1.0], seed: 1, trials: 2 };
        let rows = spiral_curve(&args).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.mean_risgw <= r.mean_sgw + 1e-12);
            assert!(r.sgw_p20 <= r.sgw_p80);
        }
    }
}
