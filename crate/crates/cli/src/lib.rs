//! Command-line front end: pulse compilation, simulation, feasibility reports
//! and Fock-ratio sweeps for a flux qubit coupled to a microwave cavity.

pub mod commands;
pub mod config;
pub mod error;
pub mod target;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cavity-synth",
    version,
    about = "Synthesize and check cavity-state preparation sequences"
)]
pub struct Cli {
    /// `key = value` configuration file; the reference device is used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a target state into a pulse sequence document.
    Compile {
        /// `fock:m`, `binary:a1,a2` or `coeffs:c0,c1,...` with complex literals like `0.6-0.2j`.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Permit free-evolution steps for targets with arbitrary phases.
        #[arg(long)]
        allow_idle: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a sequence document from `|g,0⟩`.
    Simulate {
        sequence: PathBuf,
        /// Include cavity loss and qubit decay from the configured device.
        #[arg(long)]
        dissipative: bool,
        /// Drop pure dephasing from the dissipative run.
        #[arg(long, requires = "dissipative")]
        no_dephasing: bool,
    },
    /// Timescale comparison for preparing Fock states up to `target-n`.
    Feasibility {
        #[arg(long, default_value_t = 1)]
        target_n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fock lifetime over transfer time, as CSV.
    Fig2 {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        /// Comma-separated quality factors; writes one file per value into `out-dir`.
        #[arg(long, value_delimiter = ',')]
        q_list: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Feasibility over a list of values for one configuration key, as CSV.
    Sweep {
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<String>,
        #[arg(long, default_value_t = 1)]
        target_n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(CliError::from),
    }
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text)
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Compile {
            target,
            allow_idle,
            output,
        } => {
            let c = commands::compile(&cfg, &target, allow_idle)?;
            let output = output.or_else(|| cfg.output_path.clone());
            write_out(output.as_deref(), &(c.json + "\n"))?;
            eprintln!("fidelity = {:.12}", c.fidelity);
        }
        Command::Simulate {
            sequence,
            dissipative,
            no_dephasing,
        } => {
            let seq = commands::load_sequence(&sequence)?;
            let text = if dissipative {
                commands::simulate_dissipative(&cfg, &seq, !no_dephasing)?
            } else {
                commands::simulate(&seq)?
            };
            write_out(None, &text)?;
        }
        Command::Feasibility { target_n, output } => {
            let (_, json) = commands::feasibility(&cfg, target_n)?;
            write_out(output.as_deref(), &(json + "\n"))?;
        }
        Command::Fig2 {
            n_min,
            n_max,
            q_list,
            output,
            out_dir,
        } => match q_list {
            None => write_out(
                output.as_deref(),
                &commands::fig2(&cfg, n_min, n_max, None)?,
            )?,
            Some(qs) => {
                std::fs::create_dir_all(&out_dir)
                    .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
                for q in qs {
                    let csv = commands::fig2(&cfg, n_min, n_max, Some(q))?;
                    write_out(Some(&out_dir.join(commands::fig2_file_name(q))), &csv)?;
                }
            }
        },
        Command::Sweep {
            param,
            values,
            target_n,
            output,
        } => {
            let csv = commands::sweep(&cfg, &param, &values, target_n)?;
            write_out(output.as_deref(), &csv)?;
        }
    }
    Ok(())
}
