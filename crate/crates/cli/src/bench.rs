//! Per-decision timing of the online policies against confidence-set size.

use std::hint::black_box;
use std::time::Instant;

use anyhow::{ensure, Result};
use hil_core::environment::{make_stream, ArrivalProcess, Round};
use hil_core::policies::{Observation, Policy, PolicyConfig, PolicyKind};
use hil_core::{CostModel, InstanceSpec};

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub ks: Vec<usize>,
    /// Timed rounds per repeat.
    pub horizon: usize,
    /// Untimed rounds before timing starts.
    pub warmup: usize,
    /// The median over repeats is reported.
    pub repeats: usize,
    pub policies: Vec<PolicyKind>,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            ks: vec![16, 64, 256, 1024, 4096],
            horizon: 100_000,
            warmup: 10_000,
            repeats: 3,
            policies: vec![PolicyKind::HiLcb, PolicyKind::HiLcbLite, PolicyKind::Hedge],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    pub policy: PolicyKind,
    pub ns_per_decision: f64,
}

/// `K` uniform bins and weights, `f_i = (i + 0.5) / K`, fixed cost 0.5.
pub fn bench_instance(k: usize) -> Result<InstanceSpec> {
    let f = (0..k).map(|i| (i as f64 + 0.5) / k as f64).collect();
    Ok(InstanceSpec::uniform(f, CostModel::fixed(0.5)?)?)
}

fn step(policy: &mut dyn Policy, round: &Round) {
    let model = policy.feedback_model();
    let d = black_box(policy.decide(round.phi_index));
    policy.update(round.phi_index, d, Observation::for_model(model, round, d));
}

fn time_once(cfg: &PolicyConfig, inst: &InstanceSpec, rounds: &[Round], warmup: usize, seed: u64) -> Result<f64> {
    let mut policy = cfg.build(inst, seed)?;
    for r in &rounds[..warmup] {
        step(policy.as_mut(), r);
    }
    let timed = &rounds[warmup..];
    let start = Instant::now();
    for r in timed {
        step(policy.as_mut(), r);
    }
    Ok(start.elapsed().as_nanos() as f64 / timed.len() as f64)
}

pub fn bench(opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    ensure!(opts.ks.iter().all(|&k| k >= 1), "K values must be at least 1");
    ensure!(opts.horizon >= 1, "bench horizon must be at least 1");
    ensure!(opts.repeats >= 1, "repeats must be at least 1");
    let total = opts.warmup + opts.horizon;
    let mut rows = Vec::new();
    for &k in &opts.ks {
        let inst = bench_instance(k)?;
        let stream = make_stream(&inst, &ArrivalProcess::from_instance(&inst)?, opts.seed, total)?;
        for &kind in &opts.policies {
            let cfg = PolicyConfig {
                horizon_hint: Some(total as u64),
                ..PolicyConfig::new(kind)
            };
            let mut samples = (0..opts.repeats)
                .map(|_| time_once(&cfg, &inst, stream.rounds(), opts.warmup, opts.seed))
                .collect::<Result<Vec<f64>>>()?;
            samples.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                k,
                policy: kind,
                ns_per_decision: samples[samples.len() / 2],
            });
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("K,policy,ns_per_decision\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.3}\n", r.k, r.policy.as_str(), r.ns_per_decision));
    }
    out
}
