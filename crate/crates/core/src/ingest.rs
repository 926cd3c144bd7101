//! Turning `(confidence, correct)` logs into quantized instances and traces.

use std::io::{BufRead, Write};

use crate::environment::ArrivalProcess;
use crate::error::{Error, Result};
use crate::model::{AccuracyProfile, ConfidenceGrid, CostModel, InstanceSpec};

/// One logged local inference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub confidence: f64,
    pub correct: bool,
}

/// Parses `confidence,correct` CSV. A first line whose first field is not a
/// number is treated as a header. Blank lines are skipped.
pub fn parse_trace<R: BufRead>(input: R) -> Result<Vec<TraceRow>> {
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let first = fields.next().unwrap_or("");
        if n == 0 && first.parse::<f64>().is_err() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let second = fields
            .next()
            .ok_or_else(|| err("expected two columns: confidence,correct".into()))?;
        if fields.next().is_some() {
            return Err(err("expected two columns: confidence,correct".into()));
        }
        let confidence: f64 = first
            .parse()
            .map_err(|_| err(format!("malformed confidence {first:?}")))?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(err(format!("confidence {confidence} outside [0, 1]")));
        }
        let correct = match second {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("correct flag must be 0 or 1, got {other:?}"))),
        };
        rows.push(TraceRow {
            confidence,
            correct,
        });
    }
    Ok(rows)
}

/// Bin index for confidence `c` among `bins` uniform bins.
pub fn bin_of(c: f64, bins: usize) -> usize {
    ((c * bins as f64).floor() as usize).min(bins - 1)
}

/// A trace mapped onto `K` uniform bins, rows kept in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTrace {
    grid: ConfidenceGrid,
    rows: Vec<(usize, bool)>,
    bin_counts: Vec<u64>,
    bin_correct_counts: Vec<u64>,
}

impl QuantizedTrace {
    pub fn grid(&self) -> &ConfidenceGrid {
        &self.grid
    }

    pub fn rows(&self) -> &[(usize, bool)] {
        &self.rows
    }

    pub fn bin_counts(&self) -> &[u64] {
        &self.bin_counts
    }

    pub fn bin_correct_counts(&self) -> &[u64] {
        &self.bin_correct_counts
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Replays the file's bin sequence (and recorded correctness) in order.
    pub fn to_arrivals(&self) -> ArrivalProcess {
        ArrivalProcess::TraceReplay(self.rows.clone())
    }

    /// Writes `bin,correct` CSV with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin,correct")?;
        for &(b, c) in &self.rows {
            writeln!(out, "{},{}", b, u8::from(c))?;
        }
        Ok(())
    }
}

/// Reads the `bin,correct` CSV written by [`QuantizedTrace::write_csv`],
/// checking every bin against `bins`.
pub fn read_quantized_rows<R: BufRead>(input: R, bins: usize) -> Result<Vec<(usize, bool)>> {
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let lineno = n + 1;
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (n == 0 && line.trim() == "bin,correct") {
            continue;
        }
        let (b, c) = line
            .split_once(',')
            .ok_or_else(|| err("expected two columns: bin,correct".into()))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| err(format!("malformed bin index {b:?}")))?;
        if b >= bins {
            return Err(err(format!("bin {b} out of range for {bins} bins")));
        }
        let c = match c.trim() {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("correct flag must be 0 or 1, got {other:?}"))),
        };
        rows.push((b, c));
    }
    Ok(rows)
}

pub fn quantize(rows: &[TraceRow], bins: i64) -> Result<QuantizedTrace> {
    if bins <= 0 {
        return Err(Error::InvalidBins(bins));
    }
    let k = bins as usize;
    let grid = ConfidenceGrid::uniform(k)?;
    let mut bin_counts = vec![0u64; k];
    let mut bin_correct_counts = vec![0u64; k];
    let mapped = rows
        .iter()
        .map(|r| {
            let b = bin_of(r.confidence, k);
            bin_counts[b] += 1;
            bin_correct_counts[b] += u64::from(r.correct);
            (b, r.correct)
        })
        .collect();
    Ok(QuantizedTrace {
        grid,
        rows: mapped,
        bin_counts,
        bin_correct_counts,
    })
}

/// Empirical instance from a quantized trace.
///
/// Non-empty bins get `f̂ = correct / count` and `ŵ = count / total`. Empty
/// bins get weight 0 and the mean of the nearest non-empty neighbours' `f̂`
/// (or the single neighbour at an edge). Monotonicity is recorded, not forced.
pub fn estimate_instance(qt: &QuantizedTrace, cost: CostModel) -> Result<InstanceSpec> {
    let total: u64 = qt.bin_counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyTrace);
    }
    let observed: Vec<Option<f64>> = qt
        .bin_counts
        .iter()
        .zip(&qt.bin_correct_counts)
        .map(|(&n, &c)| (n > 0).then(|| c as f64 / n as f64))
        .collect();

    let f: Vec<f64> = (0..observed.len())
        .map(|b| {
            observed[b].unwrap_or_else(|| {
                let left = observed[..b].iter().rev().find_map(|v| *v);
                let right = observed[b + 1..].iter().find_map(|v| *v);
                match (left, right) {
                    (Some(l), Some(r)) => 0.5 * (l + r),
                    (Some(v), None) | (None, Some(v)) => v,
                    (None, None) => unreachable!("total > 0"),
                }
            })
        })
        .collect();

    let weights = qt
        .bin_counts
        .iter()
        .map(|&n| n as f64 / total as f64)
        .collect::<Vec<_>>();

    InstanceSpec::new(qt.grid.clone(), AccuracyProfile::new(f)?, Some(weights), cost)
}
