//! Sliced Gromov-Wasserstein between clouds living in different dimensions,
//! next to the sliced Wasserstein distance through the same uplift.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use slicedgw::{pad_uplift, sample_directions, sgw, sw_delta, PointCloud};

fn gaussian(n: usize, scales: &[f64], seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * scales.len());
    for _ in 0..n {
        for s in scales {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(s * z);
        }
    }
    PointCloud::new(data, scales.len()).unwrap()
}

fn main() -> slicedgw::Result<()> {
    let n = 2_000;
    let flat = gaussian(n, &[2.0, 0.5], 1);
    let ball = gaussian(n, &[1.0, 1.0, 1.0], 2);
    let pancake = gaussian(n, &[2.0, 0.5, 0.05], 3);
    let dirs = sample_directions(100, 3, 7)?;

    println!("2D anisotropic cloud against 3D clouds, L = {}", dirs.len());
    for (name, target) in [("isotropic ball", &ball), ("flat pancake", &pancake)] {
        let g = sgw(&flat, target, None, &dirs)?;
        let w = sw_delta(&flat, target, None, &dirs)?;
        println!("  {name:<15} SGW {:.5}  SW {:.5}", g.value, w.value);
    }

    let lifted = pad_uplift(&flat, 3)?;
    println!("\nplanar cloud against its own uplift: SGW {:.2e}", sgw(&flat, &lifted, None, &dirs)?.value);
    let shifted = pancake.translated(&[10.0, -3.0, 4.0])?;
    println!(
        "translated target: SGW {:.5} (unchanged), SW {:.5} (grows)",
        sgw(&flat, &shifted, None, &dirs)?.value,
        sw_delta(&flat, &shifted, None, &dirs)?.value
    );

    let per = sgw(&flat, &pancake, None, &dirs)?.per_direction;
    let (lo, hi) = per.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    println!("per-direction costs range over [{lo:.5}, {hi:.5}]");
    Ok(())
}
