//! Batch front end: reads a JSON system file, writes reports, trajectories
//! and plot data.

mod commands;
pub mod file;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{
    analyze, cmd_analyze, cmd_info, cmd_place, cmd_simulate, place, plot_data, simulate,
    state_columns, trajectory_csv, Options, Outcome, PLACEMENT_TOL,
};
pub use file::{AssemblyName, BModeName, DesignSpec, InputSpec, SimulateSpec, SystemFile, TensorSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Library(#[from] crate::error::Error),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mlti", version, about = "Analysis, feedback design and simulation of tensor state-space systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for generated files.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectra, eigentuples, stability and controllability of a system.
    Analyze {
        file: PathBuf,
        /// Relative singular-value cutoff for rank decisions.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Feedback design from the file's design block.
    Place {
        file: PathBuf,
        /// Input matrix used per slice.
        #[arg(long, value_enum)]
        mode: Option<BModeName>,
        /// How slice gains are combined into the gain tensor.
        #[arg(long, value_enum)]
        assembly: Option<AssemblyName>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Trajectory simulation with zero-order-hold inputs.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        tfinal: Option<f64>,
        /// Design convention when a closed loop is built from a design block.
        #[arg(long, value_enum)]
        mode: Option<BModeName>,
        #[arg(long, value_enum)]
        assembly: Option<AssemblyName>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Version, conventions and an optional file summary.
    Info { file: Option<PathBuf> },
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 2 for an unstable system under `analyze`, 1 on any error.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(o) => {
            print!("{}", o.summary);
            for p in &o.written {
                println!("wrote {}", p.display());
            }
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Analyze { file, tol, out } => {
            let opts = Options { tol, ..Options::default() };
            cmd_analyze(&file, &opts, &out.output_dir)
        }
        Command::Place { file, mode, assembly, out } => {
            let opts = Options { mode, assembly, ..Options::default() };
            cmd_place(&file, &opts, &out.output_dir)
        }
        Command::Simulate { file, step, tfinal, mode, assembly, out } => {
            let opts = Options { mode, assembly, step, t_final: tfinal, tol: None };
            cmd_simulate(&file, &opts, &out.output_dir)
        }
        Command::Info { file } => cmd_info(file.as_deref()),
    }
}
