//! The 1D Gromov-Monge problem between two sorted samples is solved by either
//! the identity or the anti-identity pairing. Checks this against exhaustive
//! enumeration and shows the O(n) moment cost against the quadratic sum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicedgw::oracle::gm_bruteforce;
use slicedgw::{gm_cost_for_perm, gm_cost_naive, solve_gw1d, PermKind};

fn main() -> slicedgw::Result<()> {
    let xs = [0.0, 1.0, 3.0];
    let ys = [0.0, 2.0, 3.0];
    let best = solve_gw1d(&xs, &ys)?;
    println!("x = {xs:?}, y = {ys:?}");
    println!("  identity      {:.6}", gm_cost_for_perm(&xs, &ys, PermKind::Identity)?);
    println!("  anti-identity {:.6}", gm_cost_for_perm(&xs, &ys, PermKind::AntiIdentity)?);
    println!("  optimum       {:?} with cost {:.6}", best.kind, best.cost);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    println!("\n   n  closed form        brute force        permutation");
    for n in 3..=8 {
        let xs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let (brute, perm) = gm_bruteforce(&xs, &ys)?;
        println!("{n:>4}  {:<18.12} {:<18.12} {perm:?}", solve_gw1d(&xs, &ys)?.cost, brute);
    }

    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    let mut ys: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let t = std::time::Instant::now();
    let fast = gm_cost_for_perm(&xs, &ys, PermKind::Identity)?;
    let fast_time = t.elapsed();
    let small = 2_000;
    let t = std::time::Instant::now();
    let naive = gm_cost_naive(&xs[..small], &ys[..small], PermKind::Identity)?;
    let naive_time = t.elapsed();
    println!("\nmoment formula, n = {n}: {fast:.6} in {fast_time:?}");
    println!("quadratic sum,  n = {small}: {naive:.6} in {naive_time:?}");
    Ok(())
}
