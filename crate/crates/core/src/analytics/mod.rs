//! Episodes, regret aggregation, and analytic bound evaluators.

mod audit;
mod bounds;
mod episode;
mod montecarlo;
mod oracle;

pub use audit::{audit_lcb_episode, AuditReport};
pub use bounds::{
    bound_constants, kl_bernoulli, regret_lower_bound, regret_upper_bound, BoundConstants,
    Theorem,
};
pub use episode::{run_episode, summarize, CheckpointStats, EpisodeResult, EpisodeSummary};
pub use montecarlo::{
    mean_stderr, monte_carlo, run_seed, validate_checkpoints, Aggregate, AggregateRow,
};
pub use oracle::{static_threshold_oracle, ThresholdOracle};
