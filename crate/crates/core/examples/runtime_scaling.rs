//! Runtime of SGW against the number of points and the fitted log-log slope.
//! Pass the largest exponent as argument (default 18).

use slicedgw::cli::{bench_series, loglog_slope, BenchArgs};

fn main() -> slicedgw::Result<()> {
    let top: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(18);
    let args = BenchArgs { sizes: (10..=top).map(|k| 1usize << k).collect(), repeats: 3, ..BenchArgs::default() };
    let rows = bench_series(&args)?;
    println!("{:>9}  {:>10}", "n", "ms");
    for r in &rows {
        println!("{:>9}  {:>10.2}", r.n, r.millis);
    }
    println!("log-log slope {:.3}", loglog_slope(&rows));
    Ok(())
}
