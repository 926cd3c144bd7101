use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use hil_core::ingest::{estimate_instance, parse_trace, quantize};
use hil_core::{CostModel, InstanceSpec};

use crate::report::{write_file, write_json};

/// Largest accepted `--bits`; 2^20 bins is already far past any log size.
pub const MAX_BITS: u32 = 20;

pub struct IngestSummary {
    pub rows: usize,
    pub instance: InstanceSpec,
}

/// Parses `input`, quantizes to `2^bits` uniform bins and writes
/// `instance.json` and `trace.csv` into `out`.
pub fn cmd_ingest(input: &Path, bits: u32, cost_mean: f64, out: &Path) -> Result<IngestSummary> {
    ensure!(bits >= 1, "--bits must be at least 1");
    ensure!(bits <= MAX_BITS, "--bits must be at most {MAX_BITS}");
    let cost = CostModel::fixed(cost_mean)?;
    let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let rows = parse_trace(BufReader::new(file)).with_context(|| format!("reading {}", input.display()))?;
    let qt = quantize(&rows, 1i64 << bits)?;
    let instance = estimate_instance(&qt, cost)?;

    let mut trace = Vec::new();
    qt.write_csv(&mut trace)?;
    write_file(&out.join("trace.csv"), std::str::from_utf8(&trace)?)?;
    write_json(&out.join("instance.json"), &instance)?;
    Ok(IngestSummary {
        rows: rows.len(),
        instance,
    })
}
