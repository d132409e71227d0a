//! `varlp`: run variable-exponent norm experiments from a JSON config or a
//! built-in preset, writing report.csv, summary.json, and fields.bin.
//!
//! Exit codes: 0 on success (including an empty check list), 1 on config or
//! I/O errors, 2 when any row failed at runtime (all rows are still written).

mod config;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "varlp", version, about = "Variable-exponent norm experiment runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a JSON config file or a preset.
    Run {
        /// Path to a JSON experiment config (mutually exclusive with --preset).
        config: Option<PathBuf>,
        /// Name of a built-in scenario; see `varlp list-presets`.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Output directory (overrides `out_dir` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's random seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for row execution; 0 picks the machine default.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Print one line per finished row.
        #[arg(long)]
        verbose: bool,
    },
    /// List the built-in experiment presets.
    ListPresets,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    match Cli::parse().cmd {
        Cmd::ListPresets => {
            for name in config::PRESET_NAMES {
                println!("{name:<20} {}", config::preset_description(name));
            }
            0
        }
        Cmd::Run { config, preset, out, seed, threads, verbose } => {
            run_command(config, preset, out, seed, threads, verbose)
        }
    }
}

fn run_command(
    config_path: Option<PathBuf>,
    preset: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: usize,
    verbose: bool,
) -> i32 {
    let mut cfg = match (&config_path, &preset) {
        (None, None) => {
            eprintln!("error: pass a config file or --preset <name>");
            return 1;
        }
        (Some(path), None) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: reading {}: {e}", path.display());
                    return 1;
                }
            };
            // serde_json errors carry "at line L column C"; prefix the path
            // so the message is file- and line-anchored.
            match serde_json::from_str::<config::ExperimentConfig>(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {}:{}:{}: {e}", path.display(), e.line(), e.column());
                    return 1;
                }
            }
        }
        (None, Some(name)) => match config::preset(name) {
            Some(cfg) => cfg,
            None => {
                eprintln!(
                    "error: unknown preset '{name}'; available: {}",
                    config::PRESET_NAMES.join(", ")
                );
                return 1;
            }
        },
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(dir) = out {
        cfg.out_dir = Some(dir);
    }
    let Some(out_dir) = cfg.out_dir.clone() else {
        eprintln!("error: no output directory: set \"out_dir\" in the config or pass --out");
        return 1;
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: invalid config: {e}");
        return 1;
    }

    match run::execute(&cfg, &out_dir, threads, verbose) {
        Ok(outcome) => {
            println!(
                "wrote {} rows to {} ({} met, {} violated, {} unknown, {} errors)",
                outcome.rows,
                out_dir.display(),
                outcome.met,
                outcome.violated,
                outcome.unknown,
                outcome.errors
            );
            if outcome.errors > 0 {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
