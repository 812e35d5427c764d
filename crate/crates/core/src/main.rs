use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qwalk::runner::{self, RunOptions, OUTPUT_ROOT_ENV};
use qwalk::Error;

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Quantum walks of interacting bosons on a 1D lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Config file, or the name of a bundled config (see `list`)
    config: String,
    /// Output directory [default: config `output.directory`, else
    /// $QWALK_OUTPUT_ROOT/<name>, else ./output/<name>]
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Worker threads for disorder realizations
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `ensemble.seed`
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment
    Run(Common),
    /// Run an experiment once per value of a scalar parameter
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary: L, J, U, F, V, alpha, lambda, tau, phi, sigma2, t_max or dt
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
    /// List the bundled configs
    List,
    /// Print a bundled config
    Show { name: String },
}

fn options(c: &Common) -> RunOptions {
    RunOptions {
        output_dir: c.output_dir.clone(),
        workers: c.workers,
        seed: c.seed,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(c) => {
            let (config, name) = runner::load_config(&c.config)?;
            let report = runner::run(&config, &name, &options(&c))?;
            let m = &report.manifest;
            println!(
                "{}: dimension {}, {} realization(s), {:.2} s -> {}",
                name,
                m.dimension,
                m.realizations,
                m.wall_time_seconds,
                report.directory.display()
            );
            if let Some(leak) = m.leak {
                eprintln!(
                    "warning: edge leakage {:.3e} at t = {}{}",
                    leak.leakage,
                    leak.time,
                    if m.truncated {
                        "; run stopped early"
                    } else {
                        ""
                    }
                );
            }
            if !m.flagged.is_empty() {
                eprintln!(
                    "warning: {} of {} realizations reached the edges",
                    m.flagged.len(),
                    m.realizations
                );
            }
        }
        Command::Sweep {
            common,
            param,
            values,
        } => {
            let (config, name) = runner::load_config(&common.config)?;
            let report = runner::sweep(&config, &name, &param, &values, &options(&common))?;
            println!(
                "{} runs over {} -> {}",
                report.runs.len(),
                report.parameter,
                report.directory.display()
            );
        }
        Command::List => {
            for (name, line) in runner::bundled_overview() {
                println!("{name:8} {line}");
            }
            println!("\noutputs go to ${OUTPUT_ROOT_ENV}/<name> when --output-dir is not given");
        }
        Command::Show { name } => match qwalk::bundled::get(&name) {
            Some(text) => print!("{text}"),
            None => return Err(Error::Config(format!("no bundled config named {name:?}"))),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
