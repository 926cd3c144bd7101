//! CSV and metadata output shared by the commands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use hil_core::analytics::{regret_upper_bound, AggregateRow, Theorem};
use hil_core::policies::{CostMode, PolicyConfig, PolicyKind};
use hil_core::InstanceSpec;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const REGRET_HEADER: &str =
    "t,policy,mean_regret,stderr,offload_frac,accuracy,bound_1a,bound_1c,bound_2a,bound_2c";

/// Build identity recorded in metadata.
pub const GIT_DESCRIBE: &str = env!("HIL_GIT_DESCRIBE");

/// SHA-256 of the instance's canonical JSON.
pub fn instance_hash(instance: &InstanceSpec) -> String {
    let bytes = serde_json::to_vec(instance).expect("instances serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Shortest round-trip formatting; `inf` for infinite bounds.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// The four reported bounds, each present only where its assumptions hold
/// for this policy run: `1a` / `1c` for either LCB policy under iid / fixed
/// costs, `2a` / `2c` for HI-LCB under stochastic arrivals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundColumns {
    pub b1a: Option<f64>,
    pub b1c: Option<f64>,
    pub b2a: Option<f64>,
    pub b2c: Option<f64>,
}

impl BoundColumns {
    pub fn for_policy(
        instance: &InstanceSpec,
        policy: &PolicyConfig,
        stochastic: bool,
        t: usize,
    ) -> Result<Self> {
        let mut out = Self::default();
        if !policy.policy.is_lcb() {
            return Ok(out);
        }
        let eval = |th: Theorem| regret_upper_bound(instance, policy.alpha, t as u64, th);
        let full = policy.policy == PolicyKind::HiLcb;
        let has_weights = instance.weights().is_some();
        match policy.cost_mode {
            CostMode::Iid => {
                out.b1a = Some(eval(Theorem::T1a)?);
                if full && stochastic && has_weights {
                    out.b2a = Some(eval(Theorem::T2a)?);
                }
            }
            CostMode::Fixed => {
                out.b1c = Some(eval(Theorem::T1c)?);
                if full && stochastic && has_weights {
                    out.b2c = Some(eval(Theorem::T2c)?);
                }
            }
        }
        Ok(out)
    }

    fn write(&self, line: &mut String) {
        write!(
            line,
            ",{},{},{},{}",
            fmt_opt(self.b1a),
            fmt_opt(self.b1c),
            fmt_opt(self.b2a),
            fmt_opt(self.b2c)
        )
        .unwrap();
    }
}

/// `mean_regret,stderr,offload_frac,accuracy` followed by bound columns.
pub fn row_fields(row: &AggregateRow, bounds: &BoundColumns) -> String {
    let mut line = format!(
        "{},{},{},{}",
        fmt_f64(row.mean_regret),
        fmt_opt(row.stderr),
        fmt_f64(row.offload_frac),
        fmt_f64(row.accuracy)
    );
    bounds.write(&mut line);
    line
}

/// Policy labels may not contain the CSV separator.
pub fn csv_label(label: &str) -> String {
    if label.contains([',', '"', '\n']) {
        format!("\"{}\"", label.replace('"', "\"\""))
    } else {
        label.to_owned()
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_file(path, &s)
}
