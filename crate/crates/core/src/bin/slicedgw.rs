use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slicedgw::cli::{self, BenchArgs, CliError, ComputeArgs, Metric, PairwiseArgs, SpiralArgs};

#[derive(Parser)]
#[command(name = "slicedgw", version, about = "Sliced Gromov-Wasserstein discrepancies between point clouds")]
struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One discrepancy between two cloud files, reported as JSON.
    Compute {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Sgw)]
        metric: Metric,
        /// Number of projection directions.
        #[arg(long = "L", default_value_t = 50)]
        directions: usize,
        /// Subsample both clouds to the smaller size.
        #[arg(long)]
        subsample: bool,
        /// Subsample both clouds to exactly this size.
        #[arg(long)]
        n: Option<usize>,
        /// Center and scale each cloud to unit RMS norm first.
        #[arg(long)]
        normalize: bool,
        /// Include the per-direction costs (sgw and sw only).
        #[arg(long)]
        per_direction: bool,
        /// Include wall-clock milliseconds.
        #[arg(long)]
        timing: bool,
    },
    /// SGW and RISGW between two spirals as a function of rotation angle (CSV).
    Spiral {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long = "L", default_value_t = 20)]
        directions: usize,
        /// Comma-separated angles in radians; defaults to 0, π/8, …, π.
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Runtime of SGW for growing cloud sizes (CSV).
    Bench {
        /// Comma-separated sizes; defaults to 2^14 … 2^20.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long = "L", default_value_t = 50)]
        directions: usize,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Pairwise discrepancy matrix over a directory of CSV/OFF files.
    Pairwise {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Sgw)]
        metric: Metric,
        #[arg(long = "L", default_value_t = 50)]
        directions: usize,
        /// Common subsample size; defaults to the smallest cloud.
        #[arg(long)]
        n: Option<usize>,
        /// Skip centering and RMS scaling.
        #[arg(long)]
        no_normalize: bool,
        /// Also compute a 2D classical MDS embedding.
        #[arg(long)]
        mds: bool,
        /// Write the MDS coordinates here; otherwise they follow the matrix after a blank line.
        #[arg(long)]
        mds_output: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.output.as_deref();
    match cli.command {
        Command::Compute { source, target, metric, directions, subsample, n, normalize, per_direction, timing } => {
            let args = ComputeArgs {
                directions,
                seed: cli.seed,
                subsample,
                n,
                normalize,
                per_direction,
                timing,
                ..ComputeArgs::new(source, target, metric)
            };
            write_out(out, &cli::cmd_compute(&args)?)
        }
        Command::Spiral { n, directions, angles, trials } => {
            let args = SpiralArgs {
                n,
                directions,
                angles: angles.unwrap_or_else(cli::default_angles),
                seed: cli.seed,
                trials,
            };
            write_out(out, &cli::cmd_spiral(&args)?)
        }
        Command::Bench { sizes, directions, repeats } => {
            let defaults = BenchArgs::default();
            let args = BenchArgs { sizes: sizes.unwrap_or(defaults.sizes), directions, seed: cli.seed, repeats };
            write_out(out, &cli::cmd_bench(&args)?)
        }
        Command::Pairwise { dir, metric, directions, n, no_normalize, mds, mds_output } => {
            let args = PairwiseArgs {
                directions,
                seed: cli.seed,
                n,
                normalize: !no_normalize,
                mds,
                ..PairwiseArgs::new(dir, metric)
            };
            let (matrix, coords) = cli::cmd_pairwise(&args)?;
            match (coords, mds_output) {
                (Some(c), Some(path)) => {
                    write_out(out, &matrix)?;
                    write_out(Some(&path), &c)
                }
                (Some(c), None) => write_out(out, &format!("{matrix}\n{c}")),
                (None, _) => write_out(out, &matrix),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slicedgw: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
