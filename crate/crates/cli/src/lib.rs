//! Batch front-end for hierarchical inference offloading experiments.
//!
//! Every command runs deterministically from its inputs; only `bench`
//! measures wall time.

pub mod bench;
pub mod bounds;
pub mod config;
pub mod ingest;
pub mod report;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use hil_core::policies::PolicyKind;

use crate::bench::BenchOptions;
use crate::config::{Experiment, ExperimentConfig, InstanceSource};
use crate::report::{write_file, write_json};
use crate::sweep::Axis;

#[derive(Debug, Parser)]
#[command(name = "hil", version, about = "Hierarchical inference offloading simulator")]
pub struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the config's "output".
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for seed-parallel runs (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Base seed; overrides the config's seeds.base.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regret-vs-t curves for every configured policy.
    Simulate,
    /// Final-horizon regret across values of γ or α.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Nanoseconds per decision against the number of bins.
    Bench {
        #[arg(long = "k", value_delimiter = ',', default_values_t = [16, 64, 256, 1024, 4096])]
        ks: Vec<usize>,
        /// Timed rounds per repeat.
        #[arg(long, default_value_t = 100_000)]
        horizon: usize,
        /// Untimed rounds before timing.
        #[arg(long, default_value_t = 10_000)]
        warmup: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Comma-separated policy names.
        #[arg(long, value_delimiter = ',', default_values = ["hi-lcb", "hi-lcb-lite", "hedge"])]
        policies: Vec<String>,
    },
    /// Analytic regret bounds as JSON.
    Bounds {
        /// Instance JSON; defaults to the config's instance, then the
        /// built-in reference instance.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 0.52, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
    },
    /// Quantize a `confidence,correct` log into an instance and trace.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Quantize to 2^bits uniform bins.
        #[arg(long)]
        bits: u32,
        /// Fixed offloading cost of the produced instance.
        #[arg(long)]
        cost_mean: f64,
    },
}

fn experiment(cli: &Cli) -> Result<Experiment> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| anyhow!("this command needs --config <json>"))?;
    config::load(path, cli.seed)
}

fn out_dir(cli: &Cli, exp: Option<&Experiment>) -> Result<PathBuf> {
    cli.out
        .clone()
        .or_else(|| exp.and_then(|e| e.output.clone()))
        .ok_or_else(|| anyhow!("no output directory: pass --out <dir>"))
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        anyhow::ensure!(n >= 1, "--threads must be at least 1");
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting worker pool")?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate => {
            let exp = experiment(cli)?;
            simulate::cmd_simulate(&exp, &out_dir(cli, Some(&exp))?)
        }
        Command::Sweep { axis, values } => {
            let exp = experiment(cli)?;
            sweep::check_values(*axis, values)?;
            sweep::cmd_sweep(&exp, *axis, values, &out_dir(cli, Some(&exp))?)
        }
        Command::Bench {
            ks,
            horizon,
            warmup,
            repeats,
            policies,
        } => {
            let policies = policies
                .iter()
                .map(|p| p.parse::<PolicyKind>())
                .collect::<hil_core::Result<Vec<_>>>()?;
            let opts = BenchOptions {
                ks: ks.clone(),
                horizon: *horizon,
                warmup: *warmup,
                repeats: *repeats,
                policies,
                seed: cli.seed.unwrap_or(0),
            };
            let csv = bench::bench_csv(&bench::bench(&opts)?);
            print!("{csv}");
            if let Some(out) = &cli.out {
                write_file(&out.join("bench.csv"), &csv)?;
            }
            Ok(())
        }
        Command::Bounds {
            instance,
            alpha,
            horizon,
        } => {
            let inst = match (instance, &cli.config) {
                (Some(p), _) => config::read_instance(p)?,
                (None, Some(c)) => {
                    let cfg = ExperimentConfig::from_file(c)?;
                    match cfg.instance {
                        InstanceSource::Inline(spec) => spec,
                        InstanceSource::Path(p) => {
                            let base = c.parent().unwrap_or_else(|| Path::new("."));
                            config::read_instance(&base.join(p))?
                        }
                    }
                }
                (None, None) => hil_core::reference_instance(),
            };
            let json = bounds::bounds_json(&inst, *alpha, *horizon)?;
            println!("{}", serde_json::to_string_pretty(&json)?);
            if let Some(out) = &cli.out {
                write_json(&out.join("bounds.json"), &json)?;
            }
            Ok(())
        }
        Command::Ingest {
            input,
            bits,
            cost_mean,
        } => {
            let out = out_dir(cli, None)?;
            let s = ingest::cmd_ingest(input, *bits, *cost_mean, &out)?;
            println!(
                "{} rows into {} bins (monotone: {}) -> {}",
                s.rows,
                s.instance.bins(),
                s.instance.profile().is_monotone(),
                out.display()
            );
            Ok(())
        }
    }
}
