use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use hil_core::analytics::monte_carlo;
use hil_core::environment::ArrivalProcess;
use hil_core::CostModel;
use serde::Serialize;

use crate::config::Experiment;
use crate::report::{csv_label, fmt_f64, row_fields, write_file, write_json, BoundColumns};
use crate::simulate::metadata;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Fixed, known offloading cost.
    Gamma,
    /// Exploration parameter of the LCB policies.
    Alpha,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Gamma => "gamma",
            Axis::Alpha => "alpha",
        }
    }
}

pub fn check_values(axis: Axis, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    for &v in values {
        match axis {
            Axis::Alpha if !(v > 0.5) => {
                bail!("alpha values must exceed 0.5, got {v}")
            }
            Axis::Gamma if !(0.0..=1.0).contains(&v) => {
                bail!("gamma values must lie in [0, 1], got {v}")
            }
            _ => {}
        }
    }
    Ok(())
}

/// The experiment with one axis value applied. A gamma value replaces the
/// instance cost by that fixed cost (and clears per-policy overrides); an
/// alpha value sets every LCB policy's alpha.
pub fn at_value(exp: &Experiment, axis: Axis, value: f64) -> Result<Experiment> {
    let mut e = exp.clone();
    match axis {
        Axis::Gamma => {
            e.instance = e.instance.with_cost(CostModel::fixed(value)?);
            if let ArrivalProcess::Stochastic(_) = e.arrivals {
                e.arrivals = ArrivalProcess::from_instance(&e.instance)?;
            }
            for p in &mut e.policies {
                p.gamma = None;
            }
        }
        Axis::Alpha => {
            for p in e.policies.iter_mut().filter(|p| p.policy.is_lcb()) {
                p.alpha = value;
            }
        }
    }
    Ok(e)
}

pub const SWEEP_HEADER: &str = "axis,value,t,policy,mean_regret,stderr,offload_frac,accuracy,bound_1a,bound_1c,bound_2a,bound_2c";

/// One row per value and policy, at the final horizon.
pub fn sweep_csv(exp: &Experiment, axis: Axis, values: &[f64]) -> Result<String> {
    check_values(axis, values)?;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    let stochastic = exp.arrivals.is_stochastic();
    for &v in values {
        let e = at_value(exp, axis, v)?;
        for cfg in &e.policies {
            let agg = monte_carlo(&e.instance, &e.arrivals, cfg, &e.seeds, e.horizon, &[e.horizon])
                .with_context(|| format!("{} = {v}, policy {}", axis.as_str(), cfg.label()))?;
            let row = agg.last();
            let bounds = BoundColumns::for_policy(&e.instance, cfg, stochastic, row.t)?;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                axis.as_str(),
                fmt_f64(v),
                row.t,
                csv_label(&agg.policy),
                row_fields(row, &bounds)
            ));
        }
    }
    Ok(out)
}

/// Writes `sweep.csv` and `sweep.json` into `out`.
pub fn cmd_sweep(exp: &Experiment, axis: Axis, values: &[f64], out: &Path) -> Result<()> {
    let csv = sweep_csv(exp, axis, values)?;
    let mut meta = metadata(exp, "sweep");
    meta["sweep"] = serde_json::json!({"axis": axis, "values": values});
    write_file(&out.join("sweep.csv"), &csv)?;
    write_json(&out.join("sweep.json"), &meta)
}
