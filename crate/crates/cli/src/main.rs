mod commands;
mod input;
mod plot;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use choquet::Error;

/// Choquet boundaries, trace-convexity and maximum principles on finite function systems.
#[derive(Debug, Parser)]
#[command(name = "choquet", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Instance JSON; `-` or absent reads standard input
    #[arg(long, global = true, value_name = "PATH")]
    pub instance: Option<PathBuf>,
    /// Read the basis matrix from CSV instead of an instance file
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "instance")]
    pub basis_csv: Option<PathBuf>,
    /// Report destination (default standard output)
    #[arg(short, long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Emit CSV instead of JSON where the report is tabular
    #[arg(long, global = true)]
    pub csv: bool,
    /// Also write an SVG projection of the instance
    #[arg(long, global = true, value_name = "SVG")]
    pub plot: Option<PathBuf>,
    /// Basis rows used as plot axes (at most two), instead of stored coordinates
    #[arg(long, global = true, value_delimiter = ',', value_name = "I,J")]
    pub axes: Option<Vec<usize>>,
    /// Worker threads for the per-point linear programs
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, env = "CHOQUET_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tighten tolerances to 1e-12 and require reported boundaries to match
    /// the instance's expected block
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write every linear program built by the subcommand as a JSON array
    #[arg(long, global = true, value_name = "PATH")]
    pub dump_lp: Option<PathBuf>,
    /// Sup-norm tolerance for Choquet convexity
    #[arg(long, global = true)]
    pub convex_tol: Option<f64>,
    /// Tie tolerance for maximizers
    #[arg(long, global = true)]
    pub tie_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance
    #[command(subcommand)]
    Gen(GenCommand),
    /// Choquet boundary by both tests
    Boundary,
    /// Trace hull of a set of points
    Hull(SetArg),
    /// Separate a point from a set by an element of the span
    Separate {
        #[command(flatten)]
        set: SetArg,
        /// Label of the point to separate
        #[arg(long)]
        point: String,
    },
    /// Φ-extreme points and the Krein-Milman check
    Extreme {
        #[command(flatten)]
        set: SetArg,
        /// Also compute the Ky Fan extreme points
        #[arg(long)]
        kyfan: bool,
    },
    /// Ky Fan segment between two points
    Kyfan { y: String, z: String },
    /// Biconjugate and both trace-convexifications of a field
    Convexify {
        #[command(flatten)]
        field: FieldArg,
        /// Half-width padding of the pairing strip
        #[arg(long, default_value_t = choquet::convexify::DEFAULT_STRIP)]
        alpha: f64,
    },
    /// Test whether a field equals its biconjugate
    CheckConvex(FieldArg),
    /// Range of ∫f dμ over representing measures
    Keyinterval {
        #[command(flatten)]
        field: FieldArg,
        /// Restrict to one point
        #[arg(long)]
        point: Option<String>,
    },
    /// Check that a convex-trace field attains its maximum on the boundary
    Bauer {
        /// ConvexTraceSpec JSON
        #[arg(long)]
        spec: PathBuf,
    },
    /// Check a family with a common maximizer for a common boundary maximizer
    Multimax {
        /// JSON array of ConvexTraceSpecs
        #[arg(long)]
        specs: PathBuf,
    },
    /// Exposing function for a boundary point
    Expose {
        #[arg(long)]
        point: String,
    },
    /// Uniqueness of maximizers under random perturbations from the span
    Generic {
        /// Base field (default zero)
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Include per-trial outcomes
        #[arg(long)]
        outcomes: bool,
    },
    /// SVG projection of the instance
    Plot(SetArg),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Points 1..n with span{1, 1/k}
    Naturals { n: usize },
    /// Equispaced grid on [0, 1]
    Interval {
        n: usize,
        /// Use all functions instead of the affine ones
        #[arg(long)]
        full: bool,
    },
    /// Cantor-type surrogate
    Cantor {
        level: u32,
        #[arg(long, default_value_t = 2)]
        points_per_cell: usize,
    },
    /// Harmonic polynomials on a disk grid
    Disk { n_circle: usize, rings: usize, degree: usize },
    /// Seeded random system
    Random { n: usize, d: usize },
}

#[derive(Debug, Args)]
pub struct SetArg {
    /// Comma-separated point labels (default all points)
    #[arg(long, value_delimiter = ',')]
    pub set: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct FieldArg {
    /// Field values: inline JSON array, or a path to a JSON array or CSV column
    #[arg(long)]
    pub field: String,
}

/// Reports and side artifacts produced by a subcommand.
pub struct Outcome {
    pub report: String,
    pub lps: Vec<choquet::lp::LinearProgram>,
    pub svg: Option<String>,
    /// Set when the report records a violated invariant.
    pub violation: Option<String>,
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Option<String>, Error> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    if let Some(axes) = &cli.global.axes {
        if axes.len() > 2 {
            return Err(Error::InvalidInput(format!("at most two projection axes, got {}", axes.len())));
        }
    }
    let out = commands::dispatch(cli)?;
    if let Some(path) = &cli.global.dump_lp {
        fs::write(path, serde_json::to_string_pretty(&out.lps)?)?;
    }
    if let (Some(path), Some(svg)) = (&cli.global.plot, &out.svg) {
        fs::write(path, svg)?;
    }
    write_out(cli.global.output.as_ref(), &out.report)?;
    Ok(out.violation)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(why)) => {
            eprintln!("verification failed: {why}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
