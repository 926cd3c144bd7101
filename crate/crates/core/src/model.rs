//! Domain types for a hierarchical-inference problem instance and the
//! instance-level math that follows directly from them.
//!
//! A problem instance ([`InstanceSpec`]) fixes a quantized confidence grid,
//! the probability `f(φ_i)` that the local model is right in each bin, the
//! arrival distribution over bins (when arrivals are stochastic), and the
//! offloading cost process. Everything downstream addresses bins by index.
//!
//! The benchmark policy accepts exactly on the set of bins where accepting is
//! strictly cheaper in expectation, `1 − f(φ_i) < γ`. A tie goes to offload.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that probability vectors sum to one.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// The two actions available for each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    /// Keep the local model's inference.
    Accept,
    /// Send the sample to the remote model.
    Offload,
}

impl Decision {
    pub fn is_offload(self) -> bool {
        matches!(self, Decision::Offload)
    }
}

/// Finite ordered set of quantized confidence values `φ_1 ≤ … ≤ φ_K`.
///
/// Duplicate values are allowed and remain distinct bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ConfidenceGrid {
    values: Vec<f64>,
}

impl ConfidenceGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("grid must be non-empty".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && **v <= 1.0))
        {
            return Err(Error::InvalidGrid(format!(
                "value {v} at index {i} is outside (0, 1]"
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidGrid(format!(
                "values must be non-decreasing (index {} > index {})",
                i,
                i + 1
            )));
        }
        Ok(Self { values })
    }

    /// `K` uniform bins represented by their midpoints `(b + 0.5) / K`.
    pub fn uniform(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidBins(0));
        }
        let k = bins as f64;
        Self::new((0..bins).map(|b| (b as f64 + 0.5) / k).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl<'de> Deserialize<'de> for ConfidenceGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        ConfidenceGrid::new(values).map_err(serde::de::Error::custom)
    }
}

/// Per-bin probability that the local inference is correct.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyProfile {
    f: Vec<f64>,
    monotone: bool,
}

impl AccuracyProfile {
    /// Builds a profile, recording (never repairing) whether it is non-decreasing.
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = f
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && **v <= 1.0))
        {
            return Err(Error::InvalidProfile(format!(
                "f[{i}] = {v} is outside [0, 1]"
            )));
        }
        let monotone = f.windows(2).all(|w| w[0] <= w[1]);
        Ok(Self { f, monotone })
    }

    /// Like [`AccuracyProfile::new`] but rejects non-monotone input. Synthetic
    /// instances go through here.
    pub fn monotone(f: Vec<f64>) -> Result<Self> {
        let p = Self::new(f)?;
        if !p.monotone {
            return Err(Error::InvalidProfile(
                "synthetic profiles must be non-decreasing".into(),
            ));
        }
        Ok(p)
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn get(&self, i: usize) -> f64 {
        self.f[i]
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }
}

/// Offloading cost process `Γ_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", try_from = "RawCost")]
pub enum CostModel {
    /// `Γ_t = γ` for every round, known to the policy.
    #[serde(rename = "fixed")]
    FixedKnown { gamma: f64 },
    /// `Γ_t ~ Bernoulli(γ)` i.i.d.
    Bernoulli { gamma: f64 },
    /// `Γ_t` i.i.d. on a finite support of `(value, probability)` pairs.
    Discrete { support: Vec<(f64, f64)> },
}

#[derive(Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
enum RawCost {
    Fixed { gamma: f64 },
    Bernoulli { gamma: f64 },
    Discrete { support: Vec<(f64, f64)> },
}

impl TryFrom<RawCost> for CostModel {
    type Error = Error;

    fn try_from(raw: RawCost) -> Result<Self> {
        match raw {
            RawCost::Fixed { gamma } => CostModel::fixed(gamma),
            RawCost::Bernoulli { gamma } => CostModel::bernoulli(gamma),
            RawCost::Discrete { support } => CostModel::discrete(support),
        }
    }
}

fn check_unit(what: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidCost(format!("{what} = {v} is outside [0, 1]")))
    }
}

impl CostModel {
    pub fn fixed(gamma: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        Ok(CostModel::FixedKnown { gamma })
    }

    pub fn bernoulli(gamma: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        Ok(CostModel::Bernoulli { gamma })
    }

    pub fn discrete(support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidCost("discrete support is empty".into()));
        }
        for &(v, p) in &support {
            check_unit("support value", v)?;
            check_unit("support probability", p)?;
        }
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidCost(format!(
                "support probabilities sum to {total}, not 1"
            )));
        }
        Ok(CostModel::Discrete { support })
    }

    /// Two-point cost taking 0.45 or 0.55 with equal probability.
    pub fn bimodal() -> Self {
        CostModel::Discrete {
            support: vec![(0.45, 0.5), (0.55, 0.5)],
        }
    }

    /// `γ = E[Γ_t]`.
    pub fn mean(&self) -> f64 {
        match self {
            CostModel::FixedKnown { gamma } | CostModel::Bernoulli { gamma } => *gamma,
            CostModel::Discrete { support } => support.iter().map(|(v, p)| v * p).sum(),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, CostModel::FixedKnown { .. })
    }
}

/// The simulated world: grid, accuracy profile, arrival weights and cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct InstanceSpec {
    grid: ConfidenceGrid,
    profile: AccuracyProfile,
    weights: Option<Vec<f64>>,
    cost: CostModel,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    grid: Vec<f64>,
    f: Vec<f64>,
    weights: Option<Vec<f64>>,
    cost: CostModel,
}

impl TryFrom<InstanceDoc> for InstanceSpec {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        InstanceSpec::new(
            ConfidenceGrid::new(doc.grid)?,
            AccuracyProfile::new(doc.f)?,
            doc.weights,
            doc.cost,
        )
    }
}

impl From<InstanceSpec> for InstanceDoc {
    fn from(s: InstanceSpec) -> Self {
        InstanceDoc {
            grid: s.grid.values,
            f: s.profile.f,
            weights: s.weights,
            cost: s.cost,
        }
    }
}

pub(crate) fn validate_weights(weights: &[f64], len: usize) -> Result<()> {
    if weights.len() != len {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} bins",
            weights.len(),
            len
        )));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(**w >= 0.0 && w.is_finite()))
    {
        return Err(Error::InvalidWeights(format!("w[{i}] = {w} is negative")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

impl InstanceSpec {
    pub fn new(
        grid: ConfidenceGrid,
        profile: AccuracyProfile,
        weights: Option<Vec<f64>>,
        cost: CostModel,
    ) -> Result<Self> {
        if profile.len() != grid.len() {
            return Err(Error::InvalidProfile(format!(
                "{} accuracy values for {} bins",
                profile.len(),
                grid.len()
            )));
        }
        if let Some(w) = &weights {
            validate_weights(w, grid.len())?;
        }
        Ok(Self {
            grid,
            profile,
            weights,
            cost,
        })
    }

    /// Uniform grid with uniform weights: the usual synthetic setup.
    pub fn uniform(f: Vec<f64>, cost: CostModel) -> Result<Self> {
        let k = f.len();
        let grid = ConfidenceGrid::uniform(k)?;
        let profile = AccuracyProfile::monotone(f)?;
        Self::new(grid, profile, Some(vec![1.0 / k as f64; k]), cost)
    }

    pub fn grid(&self) -> &ConfidenceGrid {
        &self.grid
    }

    pub fn profile(&self) -> &AccuracyProfile {
        &self.profile
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    pub fn bins(&self) -> usize {
        self.grid.len()
    }

    /// `γ`, the mean offloading cost.
    pub fn gamma(&self) -> f64 {
        self.cost.mean()
    }

    pub fn with_cost(&self, cost: CostModel) -> Self {
        Self {
            cost,
            ..self.clone()
        }
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights, self.bins())?;
        Ok(Self {
            weights: Some(weights),
            ..self.clone()
        })
    }

    /// Splits bins into the accept set Φ_H (`1 − f < γ`) and offload set Φ_L.
    pub fn partition(&self) -> Partition {
        let gamma = self.gamma();
        let accept = self
            .profile
            .values()
            .iter()
            .map(|f| 1.0 - f < gamma)
            .collect();
        Partition { accept }
    }

    /// `Δ_i = |1 − f(φ_i) − γ|` per bin.
    pub fn gaps(&self) -> GapVector {
        let gamma = self.gamma();
        GapVector {
            deltas: self
                .profile
                .values()
                .iter()
                .map(|f| (1.0 - f - gamma).abs())
                .collect(),
        }
    }

    /// Expected one-round cost of taking `decision` in bin `index`.
    pub fn expected_step_cost(&self, index: usize, decision: Decision) -> f64 {
        match decision {
            Decision::Accept => 1.0 - self.profile.get(index),
            Decision::Offload => self.gamma(),
        }
    }
}

/// Per-bin gap `Δ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapVector {
    deltas: Vec<f64>,
}

impl GapVector {
    pub fn values(&self) -> &[f64] {
        &self.deltas
    }

    pub fn get(&self, i: usize) -> f64 {
        self.deltas[i]
    }
}

/// The benchmark split of bins: accept on Φ_H, offload on Φ_L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    accept: Vec<bool>,
}

impl Partition {
    pub fn is_high(&self, i: usize) -> bool {
        self.accept[i]
    }

    pub fn high(&self) -> Vec<usize> {
        (0..self.accept.len()).filter(|&i| self.accept[i]).collect()
    }

    pub fn low(&self) -> Vec<usize> {
        (0..self.accept.len()).filter(|&i| !self.accept[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.accept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accept.is_empty()
    }

    /// Number of leading offload bins when Φ_L is a prefix; `None` otherwise.
    pub fn threshold(&self) -> Option<usize> {
        let boundary = self.accept.iter().position(|&a| a).unwrap_or(self.accept.len());
        self.accept[boundary..]
            .iter()
            .all(|&a| a)
            .then_some(boundary)
    }

    /// Decision of the optimal static-threshold policy for bin `i`.
    pub fn decide(&self, i: usize) -> Decision {
        if self.accept[i] {
            Decision::Accept
        } else {
            Decision::Offload
        }
    }
}
