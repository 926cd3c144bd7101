use std::path::Path;

use anyhow::{Context, Result};
use hil_core::analytics::{monte_carlo, Aggregate};
use serde_json::json;

use crate::config::Experiment;
use crate::report::{
    csv_label, instance_hash, row_fields, write_file, write_json, BoundColumns, GIT_DESCRIBE,
    REGRET_HEADER,
};

/// Runs every configured policy on the configured seeds.
pub fn run(exp: &Experiment) -> Result<Vec<Aggregate>> {
    exp.policies
        .iter()
        .map(|p| {
            monte_carlo(
                &exp.instance,
                &exp.arrivals,
                p,
                &exp.seeds,
                exp.horizon,
                &exp.checkpoints,
            )
            .with_context(|| format!("simulating {}", p.label()))
        })
        .collect()
}

/// Regret-vs-t CSV, one row per policy and checkpoint.
pub fn regret_csv(exp: &Experiment, aggregates: &[Aggregate]) -> Result<String> {
    let mut out = String::from(REGRET_HEADER);
    out.push('\n');
    let stochastic = exp.arrivals.is_stochastic();
    for (cfg, agg) in exp.policies.iter().zip(aggregates) {
        for row in &agg.rows {
            let bounds = BoundColumns::for_policy(&exp.instance, cfg, stochastic, row.t)?;
            out.push_str(&format!(
                "{},{},{}\n",
                row.t,
                csv_label(&agg.policy),
                row_fields(row, &bounds)
            ));
        }
    }
    Ok(out)
}

pub fn metadata(exp: &Experiment, command: &str) -> serde_json::Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "git_describe": GIT_DESCRIBE,
        "instance_sha256": instance_hash(&exp.instance),
        "cost_model": exp.instance.cost(),
        "alpha": exp
            .policies
            .iter()
            .filter(|p| p.policy.is_lcb())
            .map(|p| json!({"policy": p.label(), "alpha": p.alpha}))
            .collect::<Vec<_>>(),
        "seeds": exp.seeds,
        "horizon": exp.horizon,
        "checkpoints": exp.checkpoints,
        "config": exp.echo,
    })
}

/// Writes `simulate.csv` and `simulate.json` into `out`.
pub fn cmd_simulate(exp: &Experiment, out: &Path) -> Result<()> {
    let aggregates = run(exp)?;
    write_file(&out.join("simulate.csv"), &regret_csv(exp, &aggregates)?)?;
    write_json(&out.join("simulate.json"), &metadata(exp, "simulate"))
}
