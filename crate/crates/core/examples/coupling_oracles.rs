//! Small-instance oracles: exhaustive permutation search, the set of optimal
//! permutations, and a randomized search over soft couplings showing that no
//! coupling does better than the best permutation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicedgw::oracle::{coupling_search, gm_bruteforce, gm_objective, optimal_set, qap_bruteforce};
use slicedgw::solve_gw1d;

fn main() -> slicedgw::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    println!(" n  best permutation      soft couplings       closed form");
    for n in 2..=6 {
        let xs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let (monge, _) = gm_bruteforce(&xs, &ys)?;
        let soft = coupling_search(&xs, &ys, 500, n as u64)?;
        println!("{n:>2}  {monge:<20.14} {soft:<20.14} {:.14}", solve_gw1d(&xs, &ys)?.cost);
    }

    // equally spaced points: both monotone pairings are optimal
    let xs = [0.0, 1.0, 2.0, 3.0];
    let (best, set) = optimal_set(&xs, &xs, gm_objective, false, 1e-12)?;
    println!("\nequally spaced, optimum {best}: {set:?}");
    let (qap, perm) = qap_bruteforce(&xs, &[0.0, 0.5, 2.0, 4.0])?;
    println!("largest cross term {qap} at {perm:?}");
    Ok(())
}
