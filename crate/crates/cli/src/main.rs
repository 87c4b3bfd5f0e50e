//! `lamlab`: relaxed energies, laminates and homogenization sweeps for the
//! two-slip layered material.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, SlipConfig};

const SLIP_HELP: &str = "\
Slip input. With --theta only, the slips are v1 = (sin θ, cos θ) and \
v2 = (-sin θ, cos θ), so the bisector v3 = -(v1 + v2)/|v1 + v2| is (0, -1). \
Explicit --v1/--v2 must form a right-handed pair at an angle in [π/2, π).";

#[derive(Debug, Parser)]
#[command(name = "lamlab", version, about, after_help = SLIP_HELP)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Slip half-angle θ in [π/4, π/2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// First slip direction as x,y.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true, requires = "v2")]
    v1: Option<[f64; 2]>,
    /// Second slip direction as x,y.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true, requires = "v1")]
    v2: Option<[f64; 2]>,
    /// Soft-phase volume fraction λ.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Manifold membership tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Tolerance passed to the laminate constructions.
    #[arg(long, global = true)]
    laminate_tol: Option<f64>,
    /// Half-width of the (b, c) grid.
    #[arg(long, global = true)]
    range: Option<f64>,
    /// Cells per side of the (b, c) grid.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Oracle directions over [0, π).
    #[arg(long, global = true)]
    n_dirs: Option<usize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Target {
    /// Row-major entries a,b,c,d of [[a, b], [c, d]].
    #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
    matrix: Option<[f64; 4]>,
    /// Orbit coordinates b,c of the symmetric det-1 representative.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    bc: Option<[f64; 2]>,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Region and relaxed energy of one matrix, as JSON.
    Classify {
        #[command(flatten)]
        target: Target,
    },
    /// Optimal simple laminate for one matrix with its residuals, as JSON.
    Laminate {
        #[command(flatten)]
        target: Target,
    },
    /// Closed forms against the brute-force laminate oracle over the grid.
    VerifyEnvelope {
        #[command(flatten)]
        output: Output,
    },
    /// Region labels and energies over the (b, c) grid.
    Regionmap {
        #[command(flatten)]
        output: Output,
    },
    /// Profiles h, h*, h⊥, h⊥* on [0, zmax].
    Hplot {
        #[arg(long, default_value_t = 3.0)]
        zmax: f64,
        #[arg(long, default_value_t = 301)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Energy of the layered microstructure over a list of layer periods.
    Homogenize {
        /// Shear bands as gamma:t_end,... with increasing ends up to the domain side.
        #[arg(long, default_value = "0.4:1", allow_hyphen_values = true)]
        gamma_bands: String,
        /// Layer periods ε.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.125,0.0625,0.03125")]
        eps_list: Vec<f64>,
        /// Laminate period as a fraction of the soft layer thickness.
        #[arg(long, default_value_t = 0.25)]
        hlam: f64,
        /// Grid cells across the finest feature.
        #[arg(long, default_value_t = 8)]
        cells_per_feature: usize,
        /// Side of the square domain.
        #[arg(long, default_value_t = 1.0)]
        domain: f64,
        /// Angle of the rigid rotation R.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rotation: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Relaxed soft-phase energy against the macroscopic shear γ.
    Whomgamma {
        /// Sampling as a:b:n.
        #[arg(long, default_value = "-2:2:201", allow_hyphen_values = true)]
        gamma_range: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(lamlab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<lamlab::Error> for CliError {
    fn from(e: lamlab::Error) -> Self {
        match e {
            lamlab::Error::InvalidSlipSystem(_) | lamlab::Error::Precondition(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Domain(e),
        }
    }
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_list::<2>(s)
}

fn parse_matrix(s: &str) -> Result<[f64; 4], String> {
    parse_list::<4>(s)
}

impl GlobalArgs {
    fn resolve(&self) -> Result<Config, CliError> {
        let mut c = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        if let Some(theta) = self.theta {
            if self.v1.is_some() {
                return Err(CliError::Usage("give either --theta or --v1/--v2, not both".into()));
            }
            c.slip = SlipConfig::Theta { theta };
        }
        if let (Some(v1), Some(v2)) = (self.v1, self.v2) {
            c.slip = SlipConfig::Vectors { v1, v2 };
        }
        if let Some(l) = self.lambda {
            c.lambda = l;
        }
        if let Some(t) = self.tol {
            c.tolerances.manifold = t;
        }
        if let Some(t) = self.laminate_tol {
            c.tolerances.laminate = t;
        }
        if let Some(r) = self.range {
            c.grid.range = r;
        }
        if let Some(n) = self.n {
            c.grid.n = n;
        }
        if let Some(n) = self.n_dirs {
            c.oracle.n_dirs = n;
        }
        if !(c.tolerances.manifold > 0.0 && c.tolerances.laminate > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        if !(c.grid.range > 0.0) || c.grid.n == 0 {
            return Err(CliError::Usage("grid needs range > 0 and n ≥ 1".into()));
        }
        Ok(c)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LAMLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("LAMLAB_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let config = cli.global.resolve()?;
    let slip = config.slip_system()?;
    match cli.command {
        Command::Classify { target } => {
            commands::classify(&config, &slip, target.matrix, target.bc, &mut open_output(None)?)
        }
        Command::Laminate { target } => {
            commands::laminate(&config, &slip, target.matrix, target.bc, &mut open_output(None)?)
        }
        Command::VerifyEnvelope { output } => {
            commands::verify_envelope(&config, &slip, &mut open_output(output.out.as_deref())?)
        }
        Command::Regionmap { output } => {
            commands::regionmap(&config, &slip, &mut open_output(output.out.as_deref())?)
        }
        Command::Hplot {
            zmax,
            samples,
            output,
        } => commands::hplot(&slip, zmax, samples, &mut open_output(output.out.as_deref())?),
        Command::Homogenize {
            gamma_bands,
            eps_list,
            hlam,
            cells_per_feature,
            domain,
            rotation,
            output,
        } => {
            let params = commands::HomogenizeParams {
                bands: commands::parse_bands(&gamma_bands)?,
                eps_list,
                hlam,
                cells_per_feature,
                domain,
                rotation,
            };
            commands::homogenize(&slip, &params, &mut open_output(output.out.as_deref())?)
        }
        Command::Whomgamma {
            gamma_range,
            output,
        } => {
            let (a, b, n) = commands::parse_range(&gamma_range)?;
            commands::whomgamma(&config, &slip, a, b, n, &mut open_output(output.out.as_deref())?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lamlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
