//! HI-LCB and HI-LCB-lite.
//!
//! Both keep per-bin offload counts `O_i` and running means `f̂_i` of the
//! revealed correctness, a global offload count `O_γ`, and a running mean
//! `γ̂` of revealed costs. In round `t` a sample in bin `i` is offloaded iff
//! its LCB is undefined or `1 − LCB_φ ≥ LCB_γ`, with
//!
//! ```text
//!   lite:  LCB_φ(i) = f̂_i − sqrt(α ln t / O_i)
//!   full:  LCB_φ(i) = max_{j ≤ i, O_j ≥ 1} lite(j)
//!   LCB_γ = γ̂ − sqrt(α ln t / O_γ)      (iid cost)
//!   LCB_γ = γ                            (fixed, known cost)
//! ```
//!
//! The prefix max in the full policy is an O(K) scan per decision; the lite
//! policy only ever touches bin `i`. LCB values are never clamped.

use crate::environment::{realize_feedback, Feedback};
use crate::model::Decision;

use super::{CostMode, Observation, Policy};

/// Learner state shared by both LCB policies.
#[derive(Debug, Clone, PartialEq)]
pub struct LcbState {
    offloads: Vec<u64>,
    fhat: Vec<f64>,
    offloads_total: u64,
    gamma_hat: f64,
    t: u64,
}

impl LcbState {
    pub fn new(bins: usize) -> Self {
        Self {
            offloads: vec![0; bins],
            fhat: vec![0.0; bins],
            offloads_total: 0,
            gamma_hat: 0.0,
            t: 1,
        }
    }

    /// Builds a state directly; used for exercising the LCB formulas.
    pub fn from_parts(offloads: Vec<u64>, fhat: Vec<f64>, gamma_hat: f64, t: u64) -> Self {
        assert_eq!(offloads.len(), fhat.len());
        assert!(t >= 1);
        let offloads_total = offloads.iter().sum();
        Self {
            offloads,
            fhat,
            offloads_total,
            gamma_hat,
            t,
        }
    }

    pub fn bins(&self) -> usize {
        self.offloads.len()
    }

    /// `O_i`.
    pub fn offloads(&self, i: usize) -> u64 {
        self.offloads[i]
    }

    /// `O_γ`.
    pub fn offloads_total(&self) -> u64 {
        self.offloads_total
    }

    /// `f̂_i`.
    pub fn fhat(&self, i: usize) -> f64 {
        self.fhat[i]
    }

    /// `γ̂`.
    pub fn gamma_hat(&self) -> f64 {
        self.gamma_hat
    }

    /// Current round, 1-based.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Folds one round's feedback in and advances `t`.
    ///
    /// Panics if the feedback does not match the decision.
    pub fn update(&mut self, i: usize, feedback: Feedback, decision: Decision) {
        assert_eq!(
            feedback.is_revealed(),
            decision.is_offload(),
            "feedback must be revealed exactly when offloading"
        );
        if let Feedback::Revealed { correct, cost } = feedback {
            let n = self.offloads[i] as f64;
            self.fhat[i] = (n * self.fhat[i] + if correct { 1.0 } else { 0.0 }) / (n + 1.0);
            let m = self.offloads_total as f64;
            self.gamma_hat = (m * self.gamma_hat + cost) / (m + 1.0);
            self.offloads[i] += 1;
            self.offloads_total += 1;
        }
        self.t += 1;
    }
}

#[inline]
fn bonus_scale(state: &LcbState, alpha: f64) -> f64 {
    alpha * (state.t as f64).ln()
}

#[inline]
fn lite_with_scale(state: &LcbState, i: usize, scale: f64) -> Option<f64> {
    let n = state.offloads[i];
    (n > 0).then(|| state.fhat[i] - (scale / n as f64).sqrt())
}

/// `f̂_i − sqrt(α ln t / O_i)`, or `None` while bin `i` is unobserved.
pub fn lcb_phi_lite(state: &LcbState, i: usize, alpha: f64) -> Option<f64> {
    lite_with_scale(state, i, bonus_scale(state, alpha))
}

/// Prefix maximum of the lite LCB over bins `0..=i` that have been observed.
pub fn lcb_phi(state: &LcbState, i: usize, alpha: f64) -> Option<f64> {
    let scale = bonus_scale(state, alpha);
    (0..=i)
        .filter_map(|j| lite_with_scale(state, j, scale))
        .reduce(f64::max)
}

/// All prefix-max LCBs in one incremental pass.
pub fn prefix_max_lcbs(state: &LcbState, alpha: f64) -> Vec<Option<f64>> {
    let scale = bonus_scale(state, alpha);
    let mut running: Option<f64> = None;
    (0..state.bins())
        .map(|j| {
            if let Some(v) = lite_with_scale(state, j, scale) {
                running = Some(running.map_or(v, |r| r.max(v)));
            }
            running
        })
        .collect()
}

/// LCB of the mean offloading cost; exactly `γ` in fixed mode.
pub fn lcb_gamma(state: &LcbState, alpha: f64, mode: CostMode, gamma: f64) -> Option<f64> {
    match mode {
        CostMode::Fixed => Some(gamma),
        CostMode::Iid => {
            let n = state.offloads_total;
            (n > 0).then(|| state.gamma_hat - (bonus_scale(state, alpha) / n as f64).sqrt())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcbVariant {
    /// Prefix-max LCB (HI-LCB).
    Full,
    /// Per-bin LCB (HI-LCB-lite).
    Lite,
}

#[derive(Debug, Clone)]
pub struct LcbPolicy {
    name: String,
    variant: LcbVariant,
    alpha: f64,
    mode: CostMode,
    /// Known cost in fixed mode; unused otherwise.
    gamma: f64,
    strict_force_offload: bool,
    state: LcbState,
}

impl LcbPolicy {
    /// `alpha` must already be validated (> 0.5), see [`super::PolicyConfig`].
    pub fn new(
        name: impl Into<String>,
        variant: LcbVariant,
        bins: usize,
        alpha: f64,
        mode: CostMode,
        gamma: f64,
    ) -> Self {
        Self {
            name: name.into(),
            variant,
            alpha,
            mode,
            gamma,
            strict_force_offload: false,
            state: LcbState::new(bins),
        }
    }

    /// Force offloading whenever the sample's own bin is unobserved, even if
    /// HI-LCB's prefix max is defined through a lower bin.
    pub fn strict_force_offload(mut self, on: bool) -> Self {
        self.strict_force_offload = on;
        self
    }

    pub fn state(&self) -> &LcbState {
        &self.state
    }

    pub fn variant(&self) -> LcbVariant {
        self.variant
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cost_mode(&self) -> CostMode {
        self.mode
    }

    /// The known cost used in fixed mode.
    pub fn known_gamma(&self) -> f64 {
        self.gamma
    }

    /// `LCB_φ(i)` under this policy's variant at the current round.
    pub fn lcb_phi(&self, i: usize) -> Option<f64> {
        match self.variant {
            LcbVariant::Full => lcb_phi(&self.state, i, self.alpha),
            LcbVariant::Lite => lcb_phi_lite(&self.state, i, self.alpha),
        }
    }

    pub fn lcb_gamma(&self) -> Option<f64> {
        lcb_gamma(&self.state, self.alpha, self.mode, self.gamma)
    }
}

impl Policy for LcbPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&mut self, bin: usize) -> Decision {
        if self.strict_force_offload && self.state.offloads[bin] == 0 {
            return Decision::Offload;
        }
        match (self.lcb_phi(bin), self.lcb_gamma()) {
            (Some(phi), Some(gamma)) if 1.0 - phi < gamma => Decision::Accept,
            _ => Decision::Offload,
        }
    }

    fn update(&mut self, bin: usize, decision: Decision, observation: Observation<'_>) {
        let feedback = match observation {
            Observation::Partial(fb) | Observation::CostRevealed { feedback: fb, .. } => fb,
            Observation::Full(round) => realize_feedback(round, decision),
        };
        self.state.update(bin, feedback, decision);
    }

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lite_lcb_hand_value() {
        let s = LcbState::from_parts(vec![100], vec![0.8], 0.0, 10_000);
        // 0.8 - sqrt(0.52 * ln(1e4) / 100)
        let expected = 0.8 - (0.52f64 * 4.0 * std::f64::consts::LN_10 / 100.0).sqrt();
        let got = lcb_phi_lite(&s, 0, 0.52).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(got, 0.581154, epsilon = 1e-6);
    }

    #[test]
    fn lite_lcb_zero_bonus_at_t1() {
        let s = LcbState::from_parts(vec![3], vec![0.37], 0.0, 1);
        assert_eq!(lcb_phi_lite(&s, 0, 5.0), Some(0.37));
    }

    #[test]
    fn lite_lcb_goes_negative_unclamped() {
        // Rounds are integral, so evaluate α ln t = 1·ln e directly.
        let mut s = LcbState::from_parts(vec![1], vec![0.0], 0.0, 1);
        let v = lite_with_scale(&s, 0, std::f64::consts::E.ln()).unwrap();
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-15);
        s.t = 3;
        assert!(lcb_phi_lite(&s, 0, 1.0).unwrap() < -1.0);
    }

    #[test]
    fn unobserved_bin_has_no_lcb() {
        let s = LcbState::new(3);
        assert_eq!(lcb_phi_lite(&s, 1, 0.6), None);
        assert_eq!(lcb_phi(&s, 2, 0.6), None);
        assert_eq!(lcb_gamma(&s, 0.6, CostMode::Iid, 0.0), None);
    }

    #[test]
    fn prefix_max_running() {
        // t = 1 removes the bonus so lite LCB == f̂.
        let s = LcbState::from_parts(vec![1, 1, 1], vec![0.2, 0.5, 0.3], 0.0, 1);
        assert_eq!(lcb_phi(&s, 0, 0.6), Some(0.2));
        assert_eq!(lcb_phi(&s, 2, 0.6), Some(0.5));
        assert_eq!(
            prefix_max_lcbs(&s, 0.6),
            vec![Some(0.2), Some(0.5), Some(0.5)]
        );
        let single = LcbState::from_parts(vec![7], vec![0.4], 0.0, 50);
        assert_eq!(lcb_phi(&single, 0, 0.9), lcb_phi_lite(&single, 0, 0.9));
    }

    #[test]
    fn prefix_max_skips_unobserved() {
        let s = LcbState::from_parts(vec![0, 2, 0], vec![0.0, 0.6, 0.0], 0.0, 1);
        assert_eq!(lcb_phi(&s, 0, 1.0), None);
        assert_eq!(lcb_phi(&s, 2, 1.0), Some(0.6));
    }

    #[test]
    fn gamma_lcb_hand_value() {
        let s = LcbState::from_parts(vec![400], vec![0.0], 0.5, 10_000);
        let got = lcb_gamma(&s, 0.52, CostMode::Iid, 0.0).unwrap();
        assert_abs_diff_eq!(got, 0.390577, epsilon = 1e-6);
        assert_eq!(lcb_gamma(&s, 0.52, CostMode::Fixed, 0.5), Some(0.5));
        let s = LcbState::from_parts(vec![1], vec![0.0], 0.45, 1);
        assert_eq!(lcb_gamma(&s, 0.52, CostMode::Iid, 0.0), Some(0.45));
    }

    #[test]
    fn first_round_offloads() {
        for variant in [LcbVariant::Full, LcbVariant::Lite] {
            for mode in [CostMode::Iid, CostMode::Fixed] {
                let mut p = LcbPolicy::new("p", variant, 4, 0.52, mode, 0.5);
                assert_eq!(p.decide(2), Decision::Offload);
            }
        }
    }

    #[test]
    fn offload_on_tie_accept_below() {
        // t = 1: LCB_φ = f̂. Fixed γ so LCB_γ is exact.
        let mut p = LcbPolicy::new("p", LcbVariant::Lite, 1, 0.52, CostMode::Fixed, 0.39);
        p.state = LcbState::from_parts(vec![5], vec![0.6], 0.0, 1);
        // 1 - 0.6 = 0.4 >= 0.39
        assert_eq!(p.decide(0), Decision::Offload);
        p.state = LcbState::from_parts(vec![5], vec![0.7], 0.0, 1);
        // 1 - 0.7 = 0.3 < 0.39
        assert_eq!(p.decide(0), Decision::Accept);
    }

    #[test]
    fn full_accepts_unobserved_bin_via_lower_bin() {
        let state = LcbState::from_parts(vec![10, 0], vec![0.95, 0.0], 0.0, 1);
        let mut p = LcbPolicy::new("p", LcbVariant::Full, 2, 0.52, CostMode::Fixed, 0.5);
        p.state = state.clone();
        assert_eq!(p.decide(1), Decision::Accept);

        let mut strict = LcbPolicy::new("p", LcbVariant::Full, 2, 0.52, CostMode::Fixed, 0.5)
            .strict_force_offload(true);
        strict.state = state.clone();
        assert_eq!(strict.decide(1), Decision::Offload);

        let mut lite = LcbPolicy::new("p", LcbVariant::Lite, 2, 0.52, CostMode::Fixed, 0.5);
        lite.state = state;
        assert_eq!(lite.decide(1), Decision::Offload);
    }

    #[test]
    fn running_mean_updates() {
        let mut s = LcbState::new(1);
        s.update(0, Feedback::Revealed { correct: true, cost: 0.5 }, Decision::Offload);
        assert_eq!((s.fhat(0), s.offloads(0), s.t()), (1.0, 1, 2));

        let mut s = LcbState::from_parts(vec![2], vec![0.5], 0.5, 3);
        s.update(0, Feedback::Revealed { correct: false, cost: 0.2 }, Decision::Offload);
        assert_abs_diff_eq!(s.fhat(0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.gamma_hat(), 0.4, epsilon = 1e-15);
        assert_eq!(s.offloads(0), 3);
        assert_eq!(s.offloads_total(), 3);
    }

    #[test]
    fn accept_only_advances_time() {
        let mut s = LcbState::from_parts(vec![2], vec![0.5], 0.5, 3);
        let before = s.clone();
        s.update(0, Feedback::Hidden, Decision::Accept);
        assert_eq!(s.t(), 4);
        assert_eq!(s.offloads(0), before.offloads(0));
        assert_eq!(s.fhat(0), before.fhat(0));
        assert_eq!(s.gamma_hat(), before.gamma_hat());
    }

    #[test]
    #[should_panic(expected = "revealed exactly when offloading")]
    fn mismatched_feedback_panics() {
        let mut s = LcbState::new(1);
        s.update(0, Feedback::Hidden, Decision::Offload);
    }
}
