//! SGW and RISGW between two noisy spirals as the second one is rotated.
//! Prints the curve as CSV; SGW swings with the angle, RISGW stays flat.

use slicedgw::cli::{cmd_spiral, default_angles, SpiralArgs};

fn main() {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let args = SpiralArgs { n: 100, directions: 20, angles: default_angles(), seed: 0, trials };
    match cmd_spiral(&args) {
        Ok(csv) => print!("{csv}"),
        Err(e) => eprintln!("{e}"),
    }
}
