use crate::environment::{realized_loss, RoundStream};
use crate::error::{Error, Result};
use crate::model::{Decision, InstanceSpec};
use crate::policies::{Observation, OptimalPolicy, Policy};

/// One policy run against the benchmark on a shared stream.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub policy: String,
    pub seed: u64,
    pub bins: Vec<usize>,
    pub correct: Vec<bool>,
    pub decisions: Vec<Decision>,
    pub optimal_decisions: Vec<Decision>,
    pub losses: Vec<f64>,
    pub optimal_losses: Vec<f64>,
    pub cumulative_loss: Vec<f64>,
    pub cumulative_optimal_loss: Vec<f64>,
    /// `r(t) = Σ_{n ≤ t} (L_n − L*_n)`.
    pub regret: Vec<f64>,
    pub offloads_per_bin: Vec<u64>,
    pub accepts_per_bin: Vec<u64>,
}

/// Offload fraction and accuracy over some prefix of an episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub offload_frac: f64,
    /// `(accepted ∧ correct + offloaded) / t`, the remote model being exact.
    pub accuracy: f64,
}

/// Values read off an episode at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointStats {
    pub t: usize,
    pub regret: f64,
    pub offload_frac: f64,
    pub accuracy: f64,
}

impl EpisodeResult {
    pub fn horizon(&self) -> usize {
        self.decisions.len()
    }

    pub fn total_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }

    /// Summary over the first `t` rounds.
    pub fn summary_at(&self, t: usize) -> EpisodeSummary {
        assert!(t >= 1 && t <= self.horizon());
        let (mut offloads, mut served_correct) = (0usize, 0usize);
        for (d, c) in self.decisions[..t].iter().zip(&self.correct[..t]) {
            match d {
                Decision::Offload => {
                    offloads += 1;
                    served_correct += 1;
                }
                Decision::Accept => served_correct += usize::from(*c),
            }
        }
        EpisodeSummary {
            offload_frac: offloads as f64 / t as f64,
            accuracy: served_correct as f64 / t as f64,
        }
    }

    pub fn summary(&self) -> EpisodeSummary {
        self.summary_at(self.horizon())
    }

    pub fn checkpoint(&self, t: usize) -> CheckpointStats {
        let s = self.summary_at(t);
        CheckpointStats {
            t,
            regret: self.regret[t - 1],
            offload_frac: s.offload_frac,
            accuracy: s.accuracy,
        }
    }
}

/// Runs `policy` and the benchmark over `stream`.
///
/// Partial-feedback policies only ever see
/// [`realize_feedback`](crate::environment::realize_feedback) output.
pub fn run_episode(
    policy: &mut dyn Policy,
    instance: &InstanceSpec,
    stream: &RoundStream,
) -> Result<EpisodeResult> {
    let k = instance.bins();
    if stream.bins() != k {
        return Err(Error::ArrivalMismatch(format!(
            "stream built for {} bins, instance has {}",
            stream.bins(),
            k
        )));
    }
    let mut benchmark = OptimalPolicy::new(instance);
    let n = stream.horizon();
    let model = policy.feedback_model();

    let mut out = EpisodeResult {
        policy: policy.name().to_owned(),
        seed: stream.seed(),
        bins: Vec::with_capacity(n),
        correct: Vec::with_capacity(n),
        decisions: Vec::with_capacity(n),
        optimal_decisions: Vec::with_capacity(n),
        losses: Vec::with_capacity(n),
        optimal_losses: Vec::with_capacity(n),
        cumulative_loss: Vec::with_capacity(n),
        cumulative_optimal_loss: Vec::with_capacity(n),
        regret: Vec::with_capacity(n),
        offloads_per_bin: vec![0; k],
        accepts_per_bin: vec![0; k],
    };
    let (mut cum, mut cum_opt) = (0.0, 0.0);

    for round in stream.rounds() {
        let bin = round.phi_index;
        let d = policy.decide(bin);
        policy.update(bin, d, Observation::for_model(model, round, d));

        let d_opt = benchmark.decide(bin);
        let loss = realized_loss(round, d);
        let loss_opt = realized_loss(round, d_opt);
        cum += loss;
        cum_opt += loss_opt;

        match d {
            Decision::Offload => out.offloads_per_bin[bin] += 1,
            Decision::Accept => out.accepts_per_bin[bin] += 1,
        }
        out.bins.push(bin);
        out.correct.push(round.correct);
        out.decisions.push(d);
        out.optimal_decisions.push(d_opt);
        out.losses.push(loss);
        out.optimal_losses.push(loss_opt);
        out.cumulative_loss.push(cum);
        out.cumulative_optimal_loss.push(cum_opt);
        out.regret.push(cum - cum_opt);
    }
    Ok(out)
}

/// Mean offload fraction and accuracy over full episodes.
pub fn summarize(results: &[EpisodeResult]) -> Option<EpisodeSummary> {
    if results.is_empty() {
        return None;
    }
    let n = results.len() as f64;
    let (of, acc) = results.iter().map(EpisodeResult::summary).fold((0.0, 0.0), |(a, b), s| {
        (a + s.offload_frac, b + s.accuracy)
    });
    Some(EpisodeSummary {
        offload_frac: of / n,
        accuracy: acc / n,
    })
}
