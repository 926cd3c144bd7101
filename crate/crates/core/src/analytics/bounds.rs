//! Closed-form regret bounds for the LCB policies and the singleton lower
//! bound. All logarithms are natural.
//!
//! With `Φ_H^{(i)} = {j ∈ Φ_H : j ≤ i}` and `c = 2α / (2α − 1)`:
//!
//! ```text
//!   C1 = Σ_H 4αΔ_i/(2α−1) + max_L 2αΔ_j (|Φ_L|+1)/(2α−1)
//!   C2 = c (Σ_H Δ_i + |Φ_L| max_L Δ_j)
//!   C3 = Σ_H 4αΔ_i/(2α−1) · min_{Φ_H^{(i)}} w_i/w_j + max_L 2αΔ_j (|Φ_L|+1)/(2α−1)
//!   C4 = c (Σ_H min_{Φ_H^{(i)}} w_iΔ_i/w_j + |Φ_L| max_L Δ_j)
//! ```
//!
//! An empty Φ_L contributes 0 to every `max_L` term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::InstanceSpec;
use crate::policies::{CostMode, PolicyKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    /// `None` without arrival weights.
    pub c3: Option<f64>,
    pub c4: Option<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

struct Split {
    high: Vec<usize>,
    low: Vec<usize>,
    gaps: Vec<f64>,
}

impl Split {
    fn new(instance: &InstanceSpec) -> Self {
        let p = instance.partition();
        Split {
            high: p.high(),
            low: p.low(),
            gaps: instance.gaps().values().to_vec(),
        }
    }

    fn max_low_gap(&self) -> f64 {
        self.low.iter().map(|&j| self.gaps[j]).fold(0.0, f64::max)
    }

    /// `min_{j ∈ Φ_H^{(i)}} w_i · num(i) / (w_j · den(j))`; 0 when `w_i = 0`.
    fn stochastic_min(
        &self,
        weights: &[f64],
        i: usize,
        ratio: impl Fn(usize, usize) -> f64,
    ) -> f64 {
        if weights[i] == 0.0 {
            return 0.0;
        }
        self.high
            .iter()
            .take_while(|&&j| j <= i)
            .filter(|&&j| weights[j] > 0.0)
            .map(|&j| weights[i] / weights[j] * ratio(i, j))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn bound_constants(instance: &InstanceSpec, alpha: f64) -> Result<BoundConstants> {
    check_alpha(alpha)?;
    let s = Split::new(instance);
    let denom = 2.0 * alpha - 1.0;
    let n_low = s.low.len() as f64;
    let low_max = s.max_low_gap();
    let accept_term = 2.0 * alpha * low_max * (n_low + 1.0) / denom;
    let c = 2.0 * alpha / denom;

    let sum_high: f64 = s.high.iter().map(|&i| s.gaps[i]).sum();
    let c1 = 4.0 * alpha * sum_high / denom + accept_term;
    let c2 = c * (sum_high + n_low * low_max);

    let (c3, c4) = match instance.weights() {
        Some(w) => {
            let c3_sum: f64 = s
                .high
                .iter()
                .map(|&i| 4.0 * alpha * s.gaps[i] / denom * s.stochastic_min(w, i, |_, _| 1.0))
                .sum();
            let c4_sum: f64 = s
                .high
                .iter()
                .map(|&i| s.stochastic_min(w, i, |i, _| s.gaps[i]))
                .sum();
            (
                Some(c3_sum + accept_term),
                Some(c * (c4_sum + n_low * low_max)),
            )
        }
        None => (None, None),
    };
    Ok(BoundConstants { c1, c2, c3, c4 })
}

/// Which upper bound to evaluate. `1b`, `1d`, `2b` and `2d` share formulas
/// with `1a`, `1c`, `1a` and `1c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// Adversarial, iid cost.
    T1a,
    T1b,
    /// Adversarial, fixed known cost.
    T1c,
    T1d,
    /// Stochastic, iid cost, HI-LCB.
    T2a,
    T2b,
    /// Stochastic, fixed known cost, HI-LCB.
    T2c,
    T2d,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::T1a,
        Theorem::T1b,
        Theorem::T1c,
        Theorem::T1d,
        Theorem::T2a,
        Theorem::T2b,
        Theorem::T2c,
        Theorem::T2d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::T1a => "1a",
            Theorem::T1b => "1b",
            Theorem::T1c => "1c",
            Theorem::T1d => "1d",
            Theorem::T2a => "2a",
            Theorem::T2b => "2b",
            Theorem::T2c => "2c",
            Theorem::T2d => "2d",
        }
    }

    /// The bound that applies to a policy run, if any.
    pub fn applicable(policy: PolicyKind, mode: CostMode, stochastic: bool) -> Option<Theorem> {
        Some(match (policy, mode, stochastic) {
            (PolicyKind::HiLcb, CostMode::Iid, false) => Theorem::T1a,
            (PolicyKind::HiLcbLite, CostMode::Iid, false) => Theorem::T1b,
            (PolicyKind::HiLcb, CostMode::Fixed, false) => Theorem::T1c,
            (PolicyKind::HiLcbLite, CostMode::Fixed, false) => Theorem::T1d,
            (PolicyKind::HiLcb, CostMode::Iid, true) => Theorem::T2a,
            (PolicyKind::HiLcbLite, CostMode::Iid, true) => Theorem::T2b,
            (PolicyKind::HiLcb, CostMode::Fixed, true) => Theorem::T2c,
            (PolicyKind::HiLcbLite, CostMode::Fixed, true) => Theorem::T2d,
            _ => return None,
        })
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown theorem {s:?}")))
    }
}

/// Upper bound on expected regret at horizon `horizon`.
///
/// A zero gap inside Φ_H makes the bound infinite; that is returned as
/// `f64::INFINITY` rather than an error.
pub fn regret_upper_bound(
    instance: &InstanceSpec,
    alpha: f64,
    horizon: u64,
    theorem: Theorem,
) -> Result<f64> {
    check_alpha(alpha)?;
    if horizon == 0 {
        return Err(Error::InvalidHorizon("horizon must be at least 1".into()));
    }
    let k = bound_constants(instance, alpha)?;
    let s = Split::new(instance);
    let log_t = (horizon as f64).ln();
    if s.high.iter().any(|&i| s.gaps[i] == 0.0) {
        return Ok(f64::INFINITY);
    }

    let per_bin = |coef: f64| -> f64 { s.high.iter().map(|&i| coef * alpha / s.gaps[i]).sum() };
    let stochastic = |coef: f64| -> Result<f64> {
        let w = instance
            .weights()
            .ok_or(Error::MissingWeights("the stochastic bounds"))?;
        Ok(s.high
            .iter()
            .map(|&i| {
                s.stochastic_min(w, i, |i, j| coef * alpha * s.gaps[i] / (s.gaps[j] * s.gaps[j]))
            })
            .sum())
    };

    Ok(match theorem {
        Theorem::T1a | Theorem::T1b | Theorem::T2b => per_bin(16.0) * log_t + k.c1,
        Theorem::T1c | Theorem::T1d | Theorem::T2d => per_bin(4.0) * log_t + k.c2,
        Theorem::T2a => stochastic(16.0)? * log_t + k.c3.unwrap(),
        Theorem::T2c => stochastic(4.0)? * log_t + k.c4.unwrap(),
    })
}

/// `D_B(p ‖ q) = p ln(p/q) + (1−p) ln((1−p)/(1−q))` with `0 ln 0 = 0`.
///
/// Infinite when `q ∈ {0, 1}` and `p ≠ q`.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "Bernoulli parameters must lie in [0, 1], got p = {p}, q = {q}"
        )));
    }
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    Ok(term(p, q) + term(1.0 - p, 1.0 - q))
}

/// `Δ ln T / D_B(γ ‖ 1 − f1)` for the singleton instance with `γ > 1 − f1`.
/// The additive O(1) term is taken as 0.
pub fn regret_lower_bound(f1: f64, gamma: f64, horizon: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f1) || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "f1 = {f1} and gamma = {gamma} must lie in [0, 1]"
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidHorizon("horizon must be at least 1".into()));
    }
    if gamma <= 1.0 - f1 {
        return Err(Error::Domain(format!(
            "lower bound needs gamma > 1 - f1 (gamma = {gamma}, 1 - f1 = {})",
            1.0 - f1
        )));
    }
    let gap = (1.0 - f1 - gamma).abs();
    let log_t = (horizon as f64).ln();
    if log_t == 0.0 {
        return Ok(0.0);
    }
    Ok(gap * log_t / kl_bernoulli(gamma, 1.0 - f1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AccuracyProfile, ConfidenceGrid, CostModel};
    use approx::assert_abs_diff_eq;

    /// γ = 0.5; gaps: bin 0 (Φ_L) 0.2, bins 1, 2 (Φ_H) 0.1 and 0.4.
    fn small(weights: Option<Vec<f64>>) -> InstanceSpec {
        InstanceSpec::new(
            ConfidenceGrid::uniform(3).unwrap(),
            AccuracyProfile::new(vec![0.3, 0.6, 0.9]).unwrap(),
            weights,
            CostModel::fixed(0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn c2_hand_value() {
        let k = bound_constants(&small(None), 1.0).unwrap();
        assert_abs_diff_eq!(k.c2, 1.4, epsilon = 1e-12);
        // C1 = 4·0.5/1 + 2·0.2·2/1
        assert_abs_diff_eq!(k.c1, 2.8, epsilon = 1e-12);
        assert!(k.c3.is_none() && k.c4.is_none());
    }

    #[test]
    fn empty_low_set_drops_max_terms() {
        let inst = InstanceSpec::uniform(vec![0.6, 0.9], CostModel::fixed(0.5).unwrap()).unwrap();
        let alpha = 0.75;
        let k = bound_constants(&inst, alpha).unwrap();
        let sum = 0.1 + 0.4;
        assert_abs_diff_eq!(k.c2, 2.0 * alpha / (2.0 * alpha - 1.0) * sum, epsilon = 1e-12);
        assert_abs_diff_eq!(k.c1, 4.0 * alpha * sum / (2.0 * alpha - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn uniform_weights_c3_matches_c1() {
        let inst = small(Some(vec![1.0 / 3.0; 3]));
        let k = bound_constants(&inst, 0.8).unwrap();
        assert_abs_diff_eq!(k.c3.unwrap(), k.c1, epsilon = 1e-12);
    }

    #[test]
    fn theorem_1c_hand_value() {
        let b = regret_upper_bound(&small(None), 1.0, 100_000, Theorem::T1c).unwrap();
        let expected = (4.0 / 0.1 + 4.0 / 0.4) * 100_000f64.ln() + 1.4;
        assert_abs_diff_eq!(b, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(b, 577.05, epsilon = 0.01);
    }

    #[test]
    fn horizon_one_leaves_constants() {
        let inst = small(Some(vec![1.0 / 3.0; 3]));
        let k = bound_constants(&inst, 0.7).unwrap();
        let at = |t| regret_upper_bound(&inst, 0.7, 1, t).unwrap();
        assert_eq!(at(Theorem::T1a), k.c1);
        assert_eq!(at(Theorem::T1c), k.c2);
        assert_eq!(at(Theorem::T2a), k.c3.unwrap());
        assert_eq!(at(Theorem::T2c), k.c4.unwrap());
    }

    #[test]
    fn one_hot_weight_on_cheapest_high_bin() {
        // Weight only on bin 1 (lowest Φ_H bin): bin 2 has w = 0 so its term
        // vanishes and bin 1's min is its self-ratio 16α/Δ_1.
        let inst = small(Some(vec![0.0, 1.0, 0.0]));
        let alpha = 0.6;
        let t = 1000;
        let b = regret_upper_bound(&inst, alpha, t, Theorem::T2a).unwrap();
        let c3 = bound_constants(&inst, alpha).unwrap().c3.unwrap();
        assert_abs_diff_eq!(b - c3, 16.0 * alpha / 0.1 * (t as f64).ln(), epsilon = 1e-9);
    }

    #[test]
    fn stochastic_bound_needs_weights() {
        assert!(matches!(
            regret_upper_bound(&small(None), 1.0, 10, Theorem::T2a),
            Err(Error::MissingWeights(_))
        ));
        assert!(matches!(
            bound_constants(&small(None), 0.5),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn kl_hand_values() {
        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert_abs_diff_eq!(kl_bernoulli(0.5, 0.25).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(kl_bernoulli(0.5, 0.25).unwrap(), 0.143841, epsilon = 1e-6);
        assert_eq!(kl_bernoulli(0.3, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(kl_bernoulli(0.0, 0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(kl_bernoulli(0.5, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_bernoulli(1.0, 1.0).unwrap(), 0.0);
        assert!(kl_bernoulli(1.2, 0.5).is_err());
    }

    #[test]
    fn lower_bound_composes() {
        let t = 100_000u64;
        let kl = 0.5 * (0.5f64 / 0.1).ln() + 0.5 * (0.5f64 / 0.9).ln();
        let expected = 0.4 * (t as f64).ln() / kl;
        assert_abs_diff_eq!(regret_lower_bound(0.9, 0.5, t).unwrap(), expected, epsilon = 1e-12);
        assert_eq!(regret_lower_bound(0.9, 0.5, 1).unwrap(), 0.0);
        assert!(regret_lower_bound(0.4, 0.6, t).is_err());
        assert!(regret_lower_bound(0.5, 0.5, t).is_err());
        let near = regret_lower_bound(0.5, 0.5 + 1e-6, t).unwrap();
        assert!(near > 1e4, "{near}");
    }

    #[test]
    fn theorem_labels() {
        for t in Theorem::ALL {
            assert_eq!(t.as_str().parse::<Theorem>().unwrap(), t);
        }
        assert_eq!(
            Theorem::applicable(PolicyKind::HiLcb, CostMode::Fixed, true),
            Some(Theorem::T2c)
        );
        assert_eq!(Theorem::applicable(PolicyKind::Hedge, CostMode::Iid, true), None);
    }
}
