//! Command-line front end for the experiment runner.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::experiment::{self, exit_code, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "collective", version, about = "Collective symplectic integrators for Lie-Poisson systems")]
pub struct Cli {
    /// Directory for CSV, JSON and gnuplot output.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,
    /// Worker threads for batches of initial conditions (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    pub gnuplot_script: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a config file or a built-in experiment by name.
    Run { config: String },
    /// List the built-in experiments.
    List,
    /// Check a config file or built-in without running it.
    Validate { config: String },
    /// Print the TOML source of a built-in experiment.
    Show { name: String },
}

fn load(spec: &str) -> Result<ExperimentConfig, Error> {
    let path = Path::new(spec);
    if path.exists() {
        return ExperimentConfig::from_path(path);
    }
    match experiment::builtin(spec) {
        Some(cfg) => Ok(cfg),
        None => Err(Error::config(format!(
            "{spec}: no such file or built-in experiment (see `collective list`)"
        ))),
    }
}

/// Executes a parsed command line and returns the process exit status.
pub fn execute(cli: &Cli) -> u8 {
    match &cli.command {
        Command::List => {
            for (name, description) in experiment::list_experiments() {
                println!("{name:<20} {description}");
            }
            0
        }
        Command::Show { name } => match experiment::builtin_source(name) {
            Some(src) => {
                print!("{src}");
                0
            }
            None => {
                eprintln!("error: no built-in experiment named {name}");
                2
            }
        },
        Command::Validate { config } => match load(config) {
            Ok(cfg) => {
                println!("{}: ok", cfg.name);
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Command::Run { config } => {
            let cfg = match load(config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            };
            let result = match cli.threads {
                Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(|| experiment::run(&cfg)),
                    Err(e) => {
                        eprintln!("error: cannot start {n} threads: {e}");
                        return 1;
                    }
                },
                None => experiment::run(&cfg),
            };
            let out = match result {
                Ok(out) => out,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            };
            let files = match experiment::write_outputs(&out, &cli.output_dir, cli.gnuplot_script) {
                Ok(files) => files,
                Err(e) => {
                    eprintln!("error: writing output to {}: {e}", cli.output_dir.display());
                    return 1;
                }
            };
            println!("{}: {} rows -> {}", cfg.name, out.rows(), files.csv.display());
            println!("diagnostics -> {}", files.json.display());
            if let Some(gp) = &files.gnuplot {
                println!("gnuplot script -> {}", gp.display());
            }
            match &out.failure {
                Some(msg) => {
                    eprintln!("error: {msg} (partial output written)");
                    4
                }
                None => 0,
            }
        }
    }
}
