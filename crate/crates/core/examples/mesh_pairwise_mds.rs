//! Pairwise SGW between a small corpus of shapes stored as CSV and OFF files,
//! followed by a 2D classical MDS embedding of the matrix.

use std::f64::consts::TAU;

use slicedgw::cli::{cmd_pairwise, Metric, PairwiseArgs};
use slicedgw::io::{to_csv, to_off};
use slicedgw::PointCloud;

fn circle(n: usize, radius: f64, squash: f64) -> PointCloud {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            vec![radius * t.cos(), squash * radius * t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

fn torus(n: usize, big: f64, small: f64) -> PointCloud {
    let side = (n as f64).sqrt() as usize;
    let mut rows = Vec::new();
    for i in 0..side {
        for j in 0..side {
            let (u, v) = (TAU * i as f64 / side as f64, TAU * j as f64 / side as f64);
            let r = big + small * v.cos();
            rows.push(vec![r * u.cos(), r * u.sin(), small * v.sin()]);
        }
    }
    PointCloud::from_rows(&rows).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    // a family of ellipses morphing from a circle, plus two tori
    for (k, squash) in [1.0, 0.8, 0.6, 0.4, 0.2].iter().enumerate() {
        std::fs::write(dir.path().join(format!("ellipse{k}.csv")), to_csv(&circle(200, 1.0, *squash)))?;
    }
    std::fs::write(dir.path().join("torus_thin.off"), to_off(&torus(225, 1.0, 0.2)).unwrap())?;
    std::fs::write(dir.path().join("torus_fat.off"), to_off(&torus(225, 1.0, 0.5)).unwrap())?;

    let args = PairwiseArgs { mds: true, ..PairwiseArgs::new(dir.path().to_path_buf(), Metric::Sgw) };
    let (matrix, coords) = cmd_pairwise(&args)?;
    println!("{matrix}");
    println!("{}", coords.unwrap_or_default());
    Ok(())
}
