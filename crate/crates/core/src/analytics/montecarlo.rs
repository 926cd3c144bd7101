use rayon::prelude::*;
use serde::Serialize;

use crate::environment::{make_stream, ArrivalProcess};
use crate::error::{Error, Result};
use crate::model::InstanceSpec;
use crate::policies::PolicyConfig;

use super::episode::{run_episode, CheckpointStats};

/// Seed-averaged statistics at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub t: usize,
    pub mean_regret: f64,
    /// `None` with a single seed.
    pub stderr: Option<f64>,
    pub seeds: usize,
    pub offload_frac: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub policy: String,
    pub rows: Vec<AggregateRow>,
    /// Regret at the last checkpoint for each seed, in seed order.
    pub final_regrets: Vec<f64>,
}

impl Aggregate {
    pub fn last(&self) -> &AggregateRow {
        self.rows.last().expect("at least one checkpoint")
    }

    pub fn at(&self, t: usize) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.t == t)
    }
}

/// Checkpoints must be strictly increasing and within `1..=horizon`.
pub fn validate_checkpoints(checkpoints: &[usize], horizon: usize) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidHorizon("no checkpoints".into()));
    }
    if checkpoints[0] == 0 || *checkpoints.last().unwrap() > horizon {
        return Err(Error::InvalidHorizon(format!(
            "checkpoints must lie in 1..={horizon}"
        )));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidHorizon(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Mean and standard error (sample std / sqrt n; `None` for n = 1).
pub fn mean_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Checkpoint stats for one seed.
pub fn run_seed(
    instance: &InstanceSpec,
    arrivals: &ArrivalProcess,
    config: &PolicyConfig,
    seed: u64,
    horizon: usize,
    checkpoints: &[usize],
) -> Result<Vec<CheckpointStats>> {
    let stream = make_stream(instance, arrivals, seed, horizon)?;
    let mut policy = config.build(instance, seed)?;
    let ep = run_episode(policy.as_mut(), instance, &stream)?;
    Ok(checkpoints.iter().map(|&t| ep.checkpoint(t)).collect())
}

/// Paired Monte Carlo over `seeds`, in parallel on the current rayon pool.
///
/// Results are folded in seed order, so output is identical for any thread
/// count.
pub fn monte_carlo(
    instance: &InstanceSpec,
    arrivals: &ArrivalProcess,
    config: &PolicyConfig,
    seeds: &[u64],
    horizon: usize,
    checkpoints: &[usize],
) -> Result<Aggregate> {
    if seeds.is_empty() {
        return Err(Error::Config("monte carlo needs at least one seed".into()));
    }
    validate_checkpoints(checkpoints, horizon)?;
    config.validate()?;

    let per_seed: Vec<Vec<CheckpointStats>> = seeds
        .par_iter()
        .map(|&s| run_seed(instance, arrivals, config, s, horizon, checkpoints))
        .collect::<Result<_>>()?;

    let n = seeds.len() as f64;
    let rows = checkpoints
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let regrets: Vec<f64> = per_seed.iter().map(|s| s[c].regret).collect();
            let (mean_regret, stderr) = mean_stderr(&regrets);
            AggregateRow {
                t,
                mean_regret,
                stderr,
                seeds: seeds.len(),
                offload_frac: per_seed.iter().map(|s| s[c].offload_frac).sum::<f64>() / n,
                accuracy: per_seed.iter().map(|s| s[c].accuracy).sum::<f64>() / n,
            }
        })
        .collect();

    Ok(Aggregate {
        policy: config.label(),
        rows,
        final_regrets: per_seed.iter().map(|s| s.last().unwrap().regret).collect(),
    })
}
