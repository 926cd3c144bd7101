use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::InstanceSpec;

/// Expected per-round cost of each static threshold and the best one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdOracle {
    /// Threshold `j` offloads bins `< j`; `best` minimizes expected cost.
    pub best: usize,
    /// `costs[j]` for `j` in `0..=K`.
    pub costs: Vec<f64>,
}

/// Enumerates the `K + 1` static thresholds under the instance's arrival
/// weights. Exact ties resolve to the larger threshold (more offloading).
pub fn static_threshold_oracle(instance: &InstanceSpec) -> Result<ThresholdOracle> {
    let w = instance
        .weights()
        .ok_or(Error::MissingWeights("the static threshold oracle"))?;
    let f = instance.profile().values();
    let gamma = instance.gamma();

    let mut cost: f64 = w.iter().zip(f).map(|(w, f)| w * (1.0 - f)).sum();
    let mut costs = Vec::with_capacity(w.len() + 1);
    costs.push(cost);
    for (wi, fi) in w.iter().zip(f) {
        cost += wi * gamma - wi * (1.0 - fi);
        costs.push(cost);
    }
    let best = (0..costs.len())
        .rev()
        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]))
        .unwrap();
    Ok(ThresholdOracle { best, costs })
}
