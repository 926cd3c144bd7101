//! Round-by-round invariant checks for the LCB policies.
//!
//! [`audit_lcb_episode`] drives an [`LcbPolicy`] over a stream and checks,
//! after every round, what the learner state must satisfy: counter
//! conservation, exact running means, forced offloading of unobserved bins,
//! the monotone prefix-max LCB (also against a naive rescan), fixed-cost
//! collapse, and that deciding from a cloned state gives the same answer.

use crate::environment::{realize_feedback, RoundStream};
use crate::model::Decision;
use crate::policies::{
    lcb_phi, prefix_max_lcbs, CostMode, LcbPolicy, LcbVariant, Observation, Policy,
};

/// Running means are compared to recomputed sums with this tolerance.
const MEAN_TOLERANCE: f64 = 1e-12;
const MAX_REPORTED: usize = 20;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub rounds: usize,
    pub offloads: u64,
    /// Rounds where the LCB was undefined and offloading was forced.
    pub forced: u64,
    /// Total number of violated checks.
    pub violation_count: usize,
    /// The first few violations, for diagnostics.
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    fn fail(&mut self, msg: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_REPORTED {
            self.violations.push(msg);
        }
    }
}

/// Runs `policy` over `stream` with partial feedback, checking invariants
/// after every round. The policy is left in its final state.
pub fn audit_lcb_episode(policy: &mut LcbPolicy, stream: &RoundStream) -> AuditReport {
    let k = stream.bins();
    let alpha = policy.alpha();
    let mut report = AuditReport::default();
    let mut correct_sums = vec![0u64; k];
    let mut cost_sum = 0.0;

    for round in stream.rounds() {
        let t = round.t;
        let i = round.phi_index;
        let state = policy.state();

        let undefined = match policy.variant() {
            LcbVariant::Lite => state.offloads(i) == 0,
            LcbVariant::Full => (0..=i).all(|j| state.offloads(j) == 0),
        };

        if policy.variant() == LcbVariant::Full {
            let fast = prefix_max_lcbs(state, alpha);
            let mut last: Option<f64> = None;
            for (j, v) in fast.iter().enumerate() {
                if *v != lcb_phi(state, j, alpha) {
                    report.fail(format!("t={t}: prefix max differs from rescan at bin {j}"));
                }
                if let (Some(prev), Some(cur)) = (last, *v) {
                    if cur < prev {
                        report.fail(format!("t={t}: LCB decreases at bin {j}"));
                    }
                }
                if v.is_some() {
                    last = *v;
                }
            }
        }
        if policy.cost_mode() == CostMode::Fixed && policy.lcb_gamma() != Some(policy.known_gamma()) {
            report.fail(format!("t={t}: fixed-cost LCB is not the known cost"));
        }

        let mut twin = policy.clone();
        let d = policy.decide(i);
        if twin.decide(i) != d {
            report.fail(format!("t={t}: decision differs on an identical state"));
        }
        if undefined {
            report.forced += 1;
            if d != Decision::Offload {
                report.fail(format!("t={t}: bin {i} accepted with an undefined LCB"));
            }
        }

        let fb = realize_feedback(round, d);
        policy.update(i, d, Observation::Partial(fb));
        report.rounds += 1;
        if d.is_offload() {
            report.offloads += 1;
            correct_sums[i] += u64::from(round.correct);
            cost_sum += round.cost;
        }

        let state = policy.state();
        if state.t() != t + 1 {
            report.fail(format!("t={t}: round counter is {}", state.t()));
        }
        let per_bin: u64 = (0..k).map(|j| state.offloads(j)).sum();
        if per_bin != state.offloads_total() || per_bin != report.offloads {
            report.fail(format!(
                "t={t}: offload counters disagree ({per_bin} per bin, {} total, {} decisions)",
                state.offloads_total(),
                report.offloads
            ));
        }
        let n = state.offloads(i);
        let expected = if n == 0 {
            0.0
        } else {
            correct_sums[i] as f64 / n as f64
        };
        if (state.fhat(i) - expected).abs() > MEAN_TOLERANCE {
            report.fail(format!(
                "t={t}: fhat[{i}] = {} but revealed mean is {expected}",
                state.fhat(i)
            ));
        }
        let m = state.offloads_total();
        let expected = if m == 0 { 0.0 } else { cost_sum / m as f64 };
        if (state.gamma_hat() - expected).abs() > MEAN_TOLERANCE {
            report.fail(format!(
                "t={t}: gamma_hat = {} but revealed mean is {expected}",
                state.gamma_hat()
            ));
        }
    }
    report
}
