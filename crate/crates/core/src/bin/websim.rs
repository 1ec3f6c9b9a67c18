use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use websim::report::{self, DEFAULT_CHECKPOINT};
use websim::{run_simulation, NetworkConfig, Protocol};

#[derive(Parser)]
#[command(name = "websim", version, about = "Clustered WSN lifetime simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol with one seed and write its trace CSV.
    Simulate {
        /// JSON config; defaults are used for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        protocol: Protocol,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every protocol over a seed range and write traces plus a comparison.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "web,leach")]
        protocols: Vec<Protocol>,
        /// Inclusive range `n..m` or a comma list.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = DEFAULT_CHECKPOINT)]
        checkpoint: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the comparison from trace CSVs written by simulate or sweep.
    Compare {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CHECKPOINT)]
        checkpoint: u64,
        /// Also write the comparison to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<NetworkConfig> {
    match path {
        Some(p) => Ok(NetworkConfig::from_json_file(p)?),
        None => Ok(NetworkConfig::default()),
    }
}

fn parse_seeds(arg: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = arg.split_once("..") {
        let lo: u64 = lo.trim().parse().context("seed range start")?;
        let hi: u64 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .context("seed range end")?;
        if hi < lo {
            bail!("empty seed range {arg}");
        }
        return Ok((lo..=hi).collect());
    }
    arg.split(',')
        .map(|s| s.trim().parse().with_context(|| format!("bad seed `{s}`")))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            protocol,
            seed,
            out,
        } => {
            let config = load_config(config.as_deref())?;
            let seed = seed.unwrap_or(config.seed);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let trace = run_simulation(&config, protocol, seed)?;
            let path = out.join(report::trace_file_name(protocol, seed));
            report::emit_trace_csv(&trace, &path)?;
            let m = &trace.milestones;
            println!(
                "{protocol} seed {seed}: {} rounds, first death {:?}, last death {:?} -> {}",
                m.rounds_total,
                m.first_death_round,
                m.last_death_round,
                path.display()
            );
        }
        Command::Sweep {
            config,
            protocols,
            seeds,
            checkpoint,
            out,
        } => {
            let config = load_config(config.as_deref())?;
            let seeds = parse_seeds(&seeds)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let sweep = report::run_sweep(&config, &protocols, &seeds, checkpoint)?;
            for trace in &sweep.traces {
                report::emit_trace_csv(
                    trace,
                    out.join(report::trace_file_name(trace.protocol, trace.seed)),
                )?;
            }
            report::emit_comparison(&sweep.report, out.join("comparison.txt"))?;
            print!("{}", sweep.report.render());
        }
        Command::Compare {
            traces,
            checkpoint,
            out,
        } => {
            let report = report::compare_trace_dir(&traces, checkpoint)?;
            if let Some(path) = out {
                report::emit_comparison(&report, path)?;
            }
            print!("{}", report.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_specs() {
        assert_eq!(parse_seeds("1..10").unwrap(), (1..=10).collect::<Vec<_>>());
        assert_eq!(parse_seeds("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_seeds("7, 9,11").unwrap(), vec![7, 9, 11]);
        assert_eq!(parse_seeds("5").unwrap(), vec![5]);
        assert!(parse_seeds("9..2").is_err());
        assert!(parse_seeds("x").is_err());
    }
}
