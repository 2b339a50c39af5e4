//! Command-line front end: `solve`, `verify` and `ci`.
//!
//! Exit codes: 0 success or expected verdicts, 1 usage or input error,
//! 2 non-convergence, 3 a verdict other than the expected one.

mod artifacts;
mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use artifacts::{fmt_float, read_csv, read_orbital_columns, read_report, Artifacts};
pub use commands::{ci_table, load_solution, manifest_text, solution_tag, write_solution};
pub use config::RunConfig;

use crate::error::Error;
use crate::solver::{SolveMode, Symmetry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mchf", version, about = "Radial MCHF solver and symmetry diagnostics for Be-like sp+pd states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize the energy for one mode and symmetry and write the artifacts.
    Solve(ConfigArgs),
    /// Run diagnostic checks, solving prerequisites on demand.
    Verify {
        which: Which,
        /// Load prerequisite solutions from the output directory instead of solving.
        #[arg(long)]
        reuse: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Block eigenvalues of the five-configuration Hamiltonian.
    Ci {
        /// Orbital CSV written by `solve` in sp+pd mode; solves the configured run if absent.
        #[arg(long)]
        orbitals: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "3p1")]
    TripletP1,
    #[value(name = "3d1")]
    TripletD1,
    Hund,
    Stationarity,
    Breaking,
    All,
}

/// Flags named exactly like the [`RunConfig`] fields; they override `--config`.
#[derive(Debug, Clone, Default, Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<SolveMode>,
    #[arg(long)]
    symmetry: Option<Symmetry>,
    #[arg(long = "Z")]
    z: Option<f64>,
    #[arg(long = "n_points")]
    n_points: Option<usize>,
    #[arg(long = "r_min")]
    r_min: Option<f64>,
    #[arg(long = "r_max")]
    r_max: Option<f64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long = "output_dir")]
    output_dir: Option<PathBuf>,
    #[arg(long = "max_iter")]
    max_iter: Option<usize>,
    #[arg(long = "energy_tol")]
    energy_tol: Option<f64>,
    #[arg(long = "gradient_tol")]
    gradient_tol: Option<f64>,
    #[arg(long)]
    shift: Option<f64>,
    #[arg(long)]
    armijo: Option<f64>,
    #[arg(long = "initial_step")]
    initial_step: Option<f64>,
    #[arg(long = "max_step")]
    max_step: Option<f64>,
    #[arg(long = "max_backtracks")]
    max_backtracks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    perturbation: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> crate::Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { c.$($field).+ = v; })*
            };
        }
        apply!(
            mode => mode, symmetry => symmetry, z => z, n_points => n_points, r_min => r_min,
            r_max => r_max, starts => starts, output_dir => output_dir,
            max_iter => solver.max_iter, energy_tol => solver.energy_tol,
            gradient_tol => solver.gradient_tol, shift => solver.shift, armijo => solver.armijo,
            initial_step => solver.initial_step, max_step => solver.max_step,
            max_backtracks => solver.max_backtracks, seed => solver.seed,
            perturbation => solver.perturbation,
        );
        c.validate()?;
        Ok(c)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(config) => config.resolve().and_then(|c| commands::solve(&c)),
        Command::Verify { which, reuse, config } => config.resolve().and_then(|c| commands::verify(&c, which, reuse)),
        Command::Ci { orbitals, config } => config.resolve().and_then(|c| commands::ci(&c, orbitals.as_deref())),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
