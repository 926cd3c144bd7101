use serde::{Deserialize, Serialize};

use crate::environment::{sub_rng, SubStream};
use crate::error::{Error, Result};
use crate::model::InstanceSpec;

use super::{
    AlwaysAccept, AlwaysOffload, HedgeFeedback, HedgePolicy, LcbPolicy, LcbVariant, OptimalPolicy, Policy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "hi-lcb")]
    HiLcb,
    #[serde(rename = "hi-lcb-lite")]
    HiLcbLite,
    #[serde(rename = "optimal")]
    Optimal,
    #[serde(rename = "hedge")]
    Hedge,
    #[serde(rename = "always-offload")]
    AlwaysOffload,
    #[serde(rename = "always-accept")]
    AlwaysAccept,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::HiLcb => "hi-lcb",
            PolicyKind::HiLcbLite => "hi-lcb-lite",
            PolicyKind::Optimal => "optimal",
            PolicyKind::Hedge => "hedge",
            PolicyKind::AlwaysOffload => "always-offload",
            PolicyKind::AlwaysAccept => "always-accept",
        }
    }

    pub fn is_lcb(self) -> bool {
        matches!(self, PolicyKind::HiLcb | PolicyKind::HiLcbLite)
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown policy {s:?}")))
    }
}

/// Whether the LCB policies learn the cost mean or are told it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    #[default]
    Iid,
    Fixed,
}

/// A Hedge tuning parameter: derived from the horizon, or given.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Rate {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for Rate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Auto => s.serialize_str("auto"),
            Rate::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Num(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) if s == "auto" => Ok(Rate::Auto),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a number, got {s:?}"
            ))),
            Repr::Num(v) if v >= 0.0 && v.is_finite() => Ok(Rate::Fixed(v)),
            Repr::Num(v) => Err(serde::de::Error::custom(format!("rate must be >= 0, got {v}"))),
        }
    }
}

fn default_alpha() -> f64 {
    0.52
}

/// JSON-configurable policy description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub policy: PolicyKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub cost_mode: CostMode,
    /// Known cost for `cost_mode = fixed`; falls back to the instance's
    /// fixed cost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Hedge learning rate; `auto` is tuned to `horizon_hint`.
    #[serde(default)]
    pub eta: Rate,
    /// Hedge forced-offload probability; `auto` is tuned to `horizon_hint`.
    #[serde(default)]
    pub explore: Rate,
    #[serde(default)]
    pub hedge_feedback: HedgeFeedback,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_hint: Option<u64>,
    #[serde(default)]
    pub strict_force_offload: bool,
    /// Report label; defaults to the policy name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl PolicyConfig {
    pub fn new(policy: PolicyKind) -> Self {
        Self {
            policy,
            alpha: default_alpha(),
            cost_mode: CostMode::Iid,
            gamma: None,
            eta: Rate::Auto,
            explore: Rate::Auto,
            hedge_feedback: HedgeFeedback::Costs,
            horizon_hint: None,
            strict_force_offload: false,
            label: None,
        }
    }

    pub fn hi_lcb(alpha: f64, cost_mode: CostMode) -> Self {
        Self {
            alpha,
            cost_mode,
            ..Self::new(PolicyKind::HiLcb)
        }
    }

    pub fn hi_lcb_lite(alpha: f64, cost_mode: CostMode) -> Self {
        Self {
            alpha,
            cost_mode,
            ..Self::new(PolicyKind::HiLcbLite)
        }
    }

    pub fn hedge(horizon_hint: Option<u64>) -> Self {
        Self {
            horizon_hint,
            ..Self::new(PolicyKind::Hedge)
        }
    }

    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.policy.as_str().to_owned())
    }

    /// Checks everything that does not depend on the instance.
    pub fn validate(&self) -> Result<()> {
        if self.policy.is_lcb() && !(self.alpha > 0.5) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.policy == PolicyKind::Hedge {
            let auto = self.eta == Rate::Auto || self.explore == Rate::Auto;
            if auto && self.horizon_hint.is_none() {
                return Err(Error::Config(
                    "\"auto\" eta or explore requires a horizon_hint".into(),
                ));
            }
            if let Rate::Fixed(v) = self.eta {
                if v <= 0.0 {
                    return Err(Error::Config(format!("eta must be > 0, got {v}")));
                }
            }
            if let Rate::Fixed(v) = self.explore {
                if v > 1.0 {
                    return Err(Error::Config(format!("explore must lie in [0, 1], got {v}")));
                }
            }
        }
        Ok(())
    }

    /// Known cost the fixed-mode LCB policies use.
    pub fn known_gamma(&self, instance: &InstanceSpec) -> Result<f64> {
        match (self.gamma, instance.cost().is_fixed()) {
            (Some(g), _) if (0.0..=1.0).contains(&g) => Ok(g),
            (Some(g), _) => Err(Error::Config(format!("gamma = {g} is outside [0, 1]"))),
            (None, true) => Ok(instance.gamma()),
            (None, false) => Err(Error::Config(
                "cost_mode = fixed needs gamma or a fixed-cost instance".into(),
            )),
        }
    }

    /// Fresh policy for one episode. `seed` only feeds randomized policies.
    pub fn build(&self, instance: &InstanceSpec, seed: u64) -> Result<Box<dyn Policy>> {
        self.validate()?;
        let bins = instance.bins();
        let name = self.label();
        Ok(match self.policy {
            PolicyKind::HiLcb | PolicyKind::HiLcbLite => {
                let variant = if self.policy == PolicyKind::HiLcb {
                    LcbVariant::Full
                } else {
                    LcbVariant::Lite
                };
                let gamma = match self.cost_mode {
                    CostMode::Fixed => self.known_gamma(instance)?,
                    CostMode::Iid => 0.0,
                };
                Box::new(
                    LcbPolicy::new(name, variant, bins, self.alpha, self.cost_mode, gamma)
                        .strict_force_offload(self.strict_force_offload),
                )
            }
            PolicyKind::Hedge => {
                let explore = match self.explore {
                    Rate::Fixed(v) => v,
                    Rate::Auto => HedgePolicy::default_explore(
                        bins,
                        self.horizon_hint.unwrap(),
                        self.hedge_feedback,
                    ),
                };
                let eta = match self.eta {
                    Rate::Fixed(v) => v,
                    Rate::Auto => {
                        HedgePolicy::default_eta(bins, self.horizon_hint.unwrap(), explore)
                    }
                };
                Box::new(HedgePolicy::new(
                    name,
                    bins,
                    eta,
                    explore,
                    self.hedge_feedback,
                    sub_rng(seed, SubStream::Policy),
                ))
            }
            PolicyKind::Optimal => Box::new(OptimalPolicy::new(instance)),
            PolicyKind::AlwaysOffload => Box::new(AlwaysOffload),
            PolicyKind::AlwaysAccept => Box::new(AlwaysAccept),
        })
    }
}
