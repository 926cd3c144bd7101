//! Pre-sampled round streams and the partial-feedback contract.
//!
//! Every round's would-be correctness and would-be offloading cost are drawn
//! up front, independent of any decision, so that all policies and the
//! benchmark can be replayed on the same randomness.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; each purpose uses its own ChaCha stream id (see
//! [`SubStream`]) so arrivals, correctness and costs are independent.

use std::io::BufRead;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{validate_weights, CostModel, Decision, InstanceSpec};

/// ChaCha stream ids, one per source of randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum SubStream {
    Arrivals = 1,
    Correctness = 2,
    Costs = 3,
    Policy = 4,
}

/// Deterministic generator for `(seed, purpose)`.
pub fn sub_rng(seed: u64, purpose: SubStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// How confidence bins arrive over time.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrivalProcess {
    /// i.i.d. draws with `Pr(bin = i) = w_i`.
    Stochastic(Vec<f64>),
    /// An explicit bin sequence; rounds beyond its length are an error.
    Adversarial(Vec<usize>),
    /// Recorded `(bin, correct)` rows replayed in file order. Correctness
    /// is taken from the trace rather than sampled.
    TraceReplay(Vec<(usize, bool)>),
}

impl ArrivalProcess {
    /// Stochastic arrivals from the instance's own weights.
    pub fn from_instance(instance: &InstanceSpec) -> Result<Self> {
        instance
            .weights()
            .map(|w| ArrivalProcess::Stochastic(w.to_vec()))
            .ok_or(Error::MissingWeights("stochastic arrivals"))
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, ArrivalProcess::Stochastic(_))
    }

    fn check(&self, bins: usize, horizon: usize) -> Result<()> {
        match self {
            ArrivalProcess::Stochastic(w) => {
                validate_weights(w, bins).map_err(|e| Error::ArrivalMismatch(e.to_string()))
            }
            ArrivalProcess::Adversarial(seq) => check_sequence(seq.iter().copied(), seq.len(), bins, horizon),
            ArrivalProcess::TraceReplay(rows) => {
                check_sequence(rows.iter().map(|r| r.0), rows.len(), bins, horizon)
            }
        }
    }
}

fn check_sequence(
    mut seq: impl Iterator<Item = usize>,
    len: usize,
    bins: usize,
    horizon: usize,
) -> Result<()> {
    if len < horizon {
        return Err(Error::ArrivalMismatch(format!(
            "sequence has {len} entries but horizon is {horizon}"
        )));
    }
    if let Some(bad) = seq.find(|&i| i >= bins) {
        return Err(Error::ArrivalMismatch(format!(
            "bin index {bad} out of range for {bins} bins"
        )));
    }
    Ok(())
}

/// Reads an adversarial sequence: one 0-based bin index per line.
pub fn read_index_sequence<R: BufRead>(reader: R) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        let idx = field.parse::<usize>().map_err(|e| Error::Parse {
            line: n + 1,
            message: format!("bad bin index {field:?}: {e}"),
        })?;
        out.push(idx);
    }
    Ok(out)
}

/// One time slot's realized randomness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Round {
    /// 1-based.
    pub t: u64,
    pub phi_index: usize,
    /// Whether the local inference would be correct.
    pub correct: bool,
    /// Would-be offloading cost `Γ_t`.
    pub cost: f64,
}

/// A fully materialized, replayable sequence of rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundStream {
    seed: u64,
    bins: usize,
    rounds: Vec<Round>,
}

impl RoundStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }
}

enum CostSampler {
    Fixed(f64),
    Bernoulli(f64),
    Discrete(Vec<f64>, WeightedIndex<f64>),
}

impl CostSampler {
    fn new(cost: &CostModel) -> Result<Self> {
        Ok(match cost {
            CostModel::FixedKnown { gamma } => CostSampler::Fixed(*gamma),
            CostModel::Bernoulli { gamma } => CostSampler::Bernoulli(*gamma),
            CostModel::Discrete { support } => {
                let index = WeightedIndex::new(support.iter().map(|s| s.1))
                    .map_err(|e| Error::InvalidCost(e.to_string()))?;
                CostSampler::Discrete(support.iter().map(|s| s.0).collect(), index)
            }
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            CostSampler::Fixed(g) => *g,
            CostSampler::Bernoulli(g) => {
                if rng.random::<f64>() < *g {
                    1.0
                } else {
                    0.0
                }
            }
            CostSampler::Discrete(values, index) => values[index.sample(rng)],
        }
    }
}

/// Builds the `horizon`-round stream for `(instance, arrivals, seed)`.
pub fn make_stream(
    instance: &InstanceSpec,
    arrivals: &ArrivalProcess,
    seed: u64,
    horizon: usize,
) -> Result<RoundStream> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon("horizon must be at least 1".into()));
    }
    let bins = instance.bins();
    arrivals.check(bins, horizon)?;

    let mut arrival_rng = sub_rng(seed, SubStream::Arrivals);
    let mut correct_rng = sub_rng(seed, SubStream::Correctness);
    let mut cost_rng = sub_rng(seed, SubStream::Costs);
    let costs = CostSampler::new(instance.cost())?;
    let f = instance.profile().values();

    let weighted = match arrivals {
        ArrivalProcess::Stochastic(w) => Some(
            WeightedIndex::new(w).map_err(|e| Error::ArrivalMismatch(e.to_string()))?,
        ),
        _ => None,
    };

    let mut rounds = Vec::with_capacity(horizon);
    for n in 0..horizon {
        // Draw correctness for every round so the correctness stream does
        // not depend on the arrival variant.
        let u: f64 = correct_rng.random();
        let (phi_index, correct) = match arrivals {
            ArrivalProcess::Stochastic(_) => {
                let i = weighted.as_ref().unwrap().sample(&mut arrival_rng);
                (i, u < f[i])
            }
            ArrivalProcess::Adversarial(seq) => (seq[n], u < f[seq[n]]),
            ArrivalProcess::TraceReplay(rows) => rows[n],
        };
        rounds.push(Round {
            t: n as u64 + 1,
            phi_index,
            correct,
            cost: costs.sample(&mut cost_rng),
        });
    }
    Ok(RoundStream {
        seed,
        bins,
        rounds,
    })
}

/// What a policy learns after deciding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feedback {
    /// Accepting reveals nothing.
    Hidden,
    /// Offloading reveals whether the local inference was right, and `Γ_t`.
    Revealed { correct: bool, cost: f64 },
}

impl Feedback {
    pub fn is_revealed(&self) -> bool {
        matches!(self, Feedback::Revealed { .. })
    }

    pub fn correct(&self) -> Option<bool> {
        match self {
            Feedback::Revealed { correct, .. } => Some(*correct),
            Feedback::Hidden => None,
        }
    }

    pub fn cost(&self) -> Option<f64> {
        match self {
            Feedback::Revealed { cost, .. } => Some(*cost),
            Feedback::Hidden => None,
        }
    }
}

pub fn realize_feedback(round: &Round, decision: Decision) -> Feedback {
    match decision {
        Decision::Offload => Feedback::Revealed {
            correct: round.correct,
            cost: round.cost,
        },
        Decision::Accept => Feedback::Hidden,
    }
}

/// `L_t = Γ_t` on offload, `1{local wrong}` on accept.
pub fn realized_loss(round: &Round, decision: Decision) -> f64 {
    match decision {
        Decision::Offload => round.cost,
        Decision::Accept => {
            if round.correct {
                0.0
            } else {
                1.0
            }
        }
    }
}
