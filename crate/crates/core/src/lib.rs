//! Hierarchical inference offloading: online policies that decide, per
//! sample, whether to keep a local model's prediction or pay to offload it,
//! measured by regret against the best static confidence threshold.
//!
//! - [`model`]: problem instances, the Φ_H / Φ_L split, gaps.
//! - [`environment`]: seeded round streams and the partial-feedback contract.
//! - [`ingest`]: `(confidence, correct)` logs to quantized instances.
//! - [`policies`]: HI-LCB, HI-LCB-lite, Hedge over thresholds, baselines.
//! - [`analytics`]: episodes, Monte Carlo regret, bound evaluators.

pub mod analytics;
pub mod environment;
pub mod error;
pub mod ingest;
pub mod model;
pub mod policies;

pub use error::{Error, Result};
pub use model::{
    AccuracyProfile, ConfidenceGrid, CostModel, Decision, GapVector, InstanceSpec, Partition,
};

/// The reference 8-bin instance used across tests and examples:
/// uniform grid and weights, fixed known cost γ = 0.5.
pub fn reference_instance() -> InstanceSpec {
    InstanceSpec::uniform(
        vec![0.30, 0.40, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95],
        CostModel::FixedKnown { gamma: 0.5 },
    )
    .expect("reference instance is valid")
}
