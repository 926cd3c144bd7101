//! Exponential weights over the `K + 1` static thresholds.
//!
//! Expert `j` offloads iff `bin < j`: expert 0 never offloads and expert `K`
//! always does. The learner is told both the would-be cost and the would-be
//! correctness every round, so every expert's loss is known.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::model::Decision;

use super::{FeedbackModel, Observation, Policy};

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeState {
    eta: f64,
    cum_loss: Vec<f64>,
    /// Unnormalized log-weights; `weights` is their softmax.
    log_weights: Vec<f64>,
    weights: Vec<f64>,
}

impl HedgeState {
    /// Uniform weights over `experts` experts.
    pub fn new(experts: usize, eta: f64) -> Self {
        assert!(experts >= 1);
        Self {
            eta,
            cum_loss: vec![0.0; experts],
            log_weights: vec![0.0; experts],
            weights: vec![1.0 / experts as f64; experts],
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumulative_losses(&self) -> &[f64] {
        &self.cum_loss
    }

    /// Replaces the weight vector (renormalized). Zero entries are floored
    /// at the smallest positive double.
    pub fn set_weights(&mut self, weights: &[f64]) {
        assert_eq!(weights.len(), self.weights.len());
        for (lw, w) in self.log_weights.iter_mut().zip(weights) {
            *lw = w.max(f64::MIN_POSITIVE).ln();
        }
        self.normalize();
    }

    /// `w_j ← w_j · exp(−η ℓ_j)`, then renormalize.
    pub fn apply_losses(&mut self, losses: &[f64]) {
        assert_eq!(losses.len(), self.cum_loss.len());
        for ((l, lw), x) in self.cum_loss.iter_mut().zip(&mut self.log_weights).zip(losses) {
            *l += x;
            *lw -= self.eta * x;
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (w, lw) in self.weights.iter_mut().zip(&self.log_weights) {
            *w = (lw - max).exp().max(f64::MIN_POSITIVE);
        }
        let total: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w /= total;
        }
    }

    /// Draws an expert index with probability proportional to its weight.
    pub fn sample_expert(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return j;
            }
        }
        self.weights.len() - 1
    }
}

/// What the Hedge learner is told after each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HedgeFeedback {
    /// `Γ_t` every round; correctness only when offloading. Accept-side
    /// expert losses are importance weighted by the offload probability.
    #[default]
    Costs,
    /// Both would-be values every round.
    Full,
}

#[derive(Debug, Clone)]
pub struct HedgePolicy {
    name: String,
    state: HedgeState,
    rng: ChaCha8Rng,
    bins: usize,
    feedback: HedgeFeedback,
    /// Probability of offloading regardless of the sampled expert.
    explore: f64,
    /// Offload probability of the last decision.
    last_offload_prob: f64,
    losses: Vec<f64>,
}

impl HedgePolicy {
    pub fn new(
        name: impl Into<String>,
        bins: usize,
        eta: f64,
        explore: f64,
        feedback: HedgeFeedback,
        rng: ChaCha8Rng,
    ) -> Self {
        assert!((0.0..=1.0).contains(&explore));
        Self {
            name: name.into(),
            state: HedgeState::new(bins + 1, eta),
            rng,
            bins,
            feedback,
            explore,
            last_offload_prob: 1.0,
            losses: Vec::with_capacity(bins + 1),
        }
    }

    /// `sqrt(8 ε ln(K + 1) / T)`; `ε = 1` gives the full-information rate.
    pub fn default_eta(bins: usize, horizon: u64, explore: f64) -> f64 {
        let scale = if explore > 0.0 { explore } else { 1.0 };
        (8.0 * scale * ((bins + 1) as f64).ln() / horizon as f64).sqrt()
    }

    /// `min(1, (ln(K + 1) / T)^(1/3))` under cost-only feedback, else 0.
    pub fn default_explore(bins: usize, horizon: u64, feedback: HedgeFeedback) -> f64 {
        match feedback {
            HedgeFeedback::Full => 0.0,
            HedgeFeedback::Costs => (((bins + 1) as f64).ln() / horizon as f64).cbrt().min(1.0),
        }
    }

    pub fn state(&self) -> &HedgeState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut HedgeState {
        &mut self.state
    }

    /// Probability that bin `bin` is offloaded under the current weights.
    pub fn offload_probability(&self, bin: usize) -> f64 {
        let tail: f64 = self.state.weights[bin + 1..].iter().sum();
        self.explore + (1.0 - self.explore) * tail
    }

    /// Per-expert losses for a round: `Γ_t` for experts that offload `bin`,
    /// `accept_loss` for the rest.
    fn fill_losses(&mut self, bin: usize, cost: f64, accept_loss: f64) {
        self.losses.clear();
        self.losses
            .extend((0..=self.bins).map(|j| if bin < j { cost } else { accept_loss }));
    }
}

impl Policy for HedgePolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn feedback_model(&self) -> FeedbackModel {
        match self.feedback {
            HedgeFeedback::Costs => FeedbackModel::CostRevealed,
            HedgeFeedback::Full => FeedbackModel::Full,
        }
    }

    fn decide(&mut self, bin: usize) -> Decision {
        if self.feedback == HedgeFeedback::Costs {
            self.last_offload_prob = self.offload_probability(bin);
        }
        if self.explore > 0.0 && self.rng.random::<f64>() < self.explore {
            return Decision::Offload;
        }
        if bin < self.state.sample_expert(&mut self.rng) {
            Decision::Offload
        } else {
            Decision::Accept
        }
    }

    fn update(&mut self, bin: usize, _decision: Decision, observation: Observation<'_>) {
        match observation {
            Observation::Full(round) => {
                let accept_loss = if round.correct { 0.0 } else { 1.0 };
                self.fill_losses(bin, round.cost, accept_loss);
            }
            Observation::CostRevealed { cost, feedback } => {
                let accept_loss = match feedback.correct() {
                    Some(false) => 1.0 / self.last_offload_prob,
                    _ => 0.0,
                };
                self.fill_losses(bin, cost, accept_loss);
            }
            Observation::Partial(_) => {
                panic!("hedge baseline needs the offloading cost every round")
            }
        }
        let losses = std::mem::take(&mut self.losses);
        self.state.apply_losses(&losses);
        self.losses = losses;
    }

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{sub_rng, Feedback, Round, SubStream};
    use approx::assert_abs_diff_eq;

    fn sum(w: &[f64]) -> f64 {
        w.iter().sum()
    }

    #[test]
    fn zero_eta_is_identity() {
        let mut s = HedgeState::new(3, 0.0);
        s.apply_losses(&[1.0, 0.0, 0.3]);
        assert_eq!(s.weights(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn two_expert_hand_value() {
        let mut s = HedgeState::new(2, std::f64::consts::LN_2);
        s.apply_losses(&[0.0, 1.0]);
        assert_abs_diff_eq!(s.weights()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.weights()[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn equal_losses_leave_weights() {
        let mut s = HedgeState::new(4, 0.7);
        s.set_weights(&[0.1, 0.2, 0.3, 0.4]);
        let before = s.weights().to_vec();
        s.apply_losses(&[0.5; 4]);
        for (a, b) in s.weights().iter().zip(&before) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn weights_stay_positive_and_normalized() {
        let mut s = HedgeState::new(5, 2.0);
        for _ in 0..2000 {
            s.apply_losses(&[1.0, 0.0, 1.0, 1.0, 1.0]);
        }
        assert!(s.weights().iter().all(|&w| w > 0.0));
        assert_abs_diff_eq!(sum(s.weights()), 1.0, epsilon = 1e-12);
    }

    fn full(bins: usize, seed: u64) -> HedgePolicy {
        HedgePolicy::new("h", bins, 0.1, 0.0, HedgeFeedback::Full, sub_rng(seed, SubStream::Policy))
    }

    #[test]
    fn point_mass_experts() {
        let mut p = full(4, 0);
        let mut w = vec![0.0; 5];
        w[0] = 1.0;
        p.state_mut().set_weights(&w);
        assert!((0..200).all(|i| p.decide(i % 4) == Decision::Accept));
        let mut w = vec![0.0; 5];
        w[4] = 1.0;
        p.state_mut().set_weights(&w);
        assert!((0..200).all(|i| p.decide(i % 4) == Decision::Offload));
    }

    #[test]
    fn uniform_offload_probability() {
        // 16 of the 17 experts offload bin 0.
        let mut p = full(16, 9);
        let p_true = 16.0 / 17.0;
        assert!((p.offload_probability(0) - p_true).abs() < 1e-12);
        let n = 200_000;
        let offloads = (0..n).filter(|_| p.decide(0).is_offload()).count();
        let p_hat = offloads as f64 / n as f64;
        let se = (p_true * (1.0 - p_true) / n as f64).sqrt();
        assert!((p_hat - p_true).abs() < 4.0 * se, "{p_hat} vs {p_true}");
    }

    #[test]
    fn exploration_raises_offload_probability() {
        let mut p = HedgePolicy::new("h", 2, 0.1, 0.25, HedgeFeedback::Costs, sub_rng(1, SubStream::Policy));
        p.state_mut().set_weights(&[1.0, 0.0, 0.0]);
        assert!((p.offload_probability(1) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn full_information_losses_by_threshold() {
        let mut p = full(3, 0);
        let round = Round {
            t: 1,
            phi_index: 1,
            correct: false,
            cost: 0.45,
        };
        p.update(1, Decision::Accept, Observation::Full(&round));
        assert_eq!(p.state().cumulative_losses(), &[1.0, 1.0, 0.45, 0.45]);
    }

    #[test]
    fn cost_only_losses_are_importance_weighted() {
        let mut p = HedgePolicy::new("h", 3, 0.1, 0.2, HedgeFeedback::Costs, sub_rng(0, SubStream::Policy));
        let d = p.decide(1);
        let prob = p.offload_probability(1);
        let fb = Feedback::Revealed { correct: false, cost: 0.55 };
        p.update(1, d, Observation::CostRevealed { cost: 0.55, feedback: fb });
        let l = p.state().cumulative_losses();
        assert!((l[0] - 1.0 / prob).abs() < 1e-12);
        assert!((l[1] - 1.0 / prob).abs() < 1e-12);
        assert_eq!(&l[2..], &[0.55, 0.55]);

        // Accepting reveals the cost but not correctness.
        p.update(1, Decision::Accept, Observation::CostRevealed { cost: 0.45, feedback: Feedback::Hidden });
        let l2 = p.state().cumulative_losses();
        assert!((l2[0] - 1.0 / prob).abs() < 1e-12);
        assert!((l2[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_rates() {
        assert_abs_diff_eq!(
            HedgePolicy::default_eta(16, 100_000, 0.0),
            (8.0 * 17f64.ln() / 1e5).sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(HedgePolicy::default_explore(16, 100_000, HedgeFeedback::Full), 0.0);
        let e = HedgePolicy::default_explore(8, 100_000, HedgeFeedback::Costs);
        assert_abs_diff_eq!(e, (9f64.ln() / 1e5).cbrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            HedgePolicy::default_eta(8, 100_000, e),
            (8.0 * e * 9f64.ln() / 1e5).sqrt(),
            epsilon = 1e-15
        );
    }
}
