mod common;

use std::fmt::Write as _;

use common::within_3se;
use hil_core::environment::{make_stream, sub_rng, ArrivalProcess, SubStream};
use hil_core::ingest::{estimate_instance, parse_trace, quantize};
use hil_core::{reference_instance, CostModel};
use rand::Rng;

/// Synthesizes a `confidence,correct` log from the reference instance:
/// bins and correctness from a seeded stream, confidence uniform in the bin.
fn synthetic_trace(rows: usize, seed: u64, crlf: bool) -> String {
    let inst = reference_instance();
    let k = inst.bins() as f64;
    let arrivals = ArrivalProcess::from_instance(&inst).unwrap();
    let stream = make_stream(&inst, &arrivals, seed, rows).unwrap();
    let mut jitter = sub_rng(seed, SubStream::Policy);
    let eol = if crlf { "\r\n" } else { "\n" };
    let mut out = format!("confidence,correct{eol}");
    for r in stream.rounds() {
        // Keep away from the bin edges so float rounding never moves a row.
        let c = (r.phi_index as f64 + jitter.random_range(0.01..0.99)) / k;
        write!(out, "{c:.6},{}{eol}", u8::from(r.correct)).unwrap();
    }
    out
}

#[test]
fn million_row_round_trip_recovers_instance() {
    const N: usize = 1_000_000;
    let truth = reference_instance();
    let rows = parse_trace(synthetic_trace(N, 7, false).as_bytes()).unwrap();
    assert_eq!(rows.len(), N);
    let qt = quantize(&rows, truth.bins() as i64).unwrap();
    let est = estimate_instance(&qt, CostModel::fixed(0.5).unwrap()).unwrap();

    let w_true = truth.weights().unwrap();
    let w_est = est.weights().unwrap();
    for i in 0..truth.bins() {
        let f = truth.profile().get(i);
        let n = qt.bin_counts()[i] as f64;
        assert!(
            within_3se(est.profile().get(i), f, f * (1.0 - f), n),
            "bin {i}: f̂ {} vs {f}",
            est.profile().get(i)
        );
        let w = w_true[i];
        assert!(
            within_3se(w_est[i], w, w * (1.0 - w), N as f64),
            "bin {i}: ŵ {} vs {w}",
            w_est[i]
        );
    }
    assert_eq!(est.gamma(), 0.5);
}

#[test]
fn crlf_and_lf_parse_identically() {
    let lf = parse_trace(synthetic_trace(500, 3, false).as_bytes()).unwrap();
    let crlf = parse_trace(synthetic_trace(500, 3, true).as_bytes()).unwrap();
    assert_eq!(lf, crlf);
}

#[test]
fn trace_replay_preserves_file_order() {
    let text = synthetic_trace(5_000, 4, false);
    let rows = parse_trace(text.as_bytes()).unwrap();
    let qt = quantize(&rows, 16).unwrap();
    let inst = estimate_instance(&qt, CostModel::fixed(0.5).unwrap()).unwrap();
    let stream = make_stream(&inst, &qt.to_arrivals(), 0, qt.len()).unwrap();
    let replayed: Vec<(usize, bool)> = stream
        .rounds()
        .iter()
        .map(|r| (r.phi_index, r.correct))
        .collect();
    assert_eq!(replayed, qt.rows());
    assert!(make_stream(&inst, &qt.to_arrivals(), 0, qt.len() + 1).is_err());
}

#[test]
fn quantized_csv_lists_rows_in_order() {
    let rows = parse_trace("0.93,1\n0.41,0\n1.0,1\n".as_bytes()).unwrap();
    let qt = quantize(&rows, 16).unwrap();
    let mut out = Vec::new();
    qt.write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "bin,correct\n14,1\n6,0\n15,1\n");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_trace("confidence,correct\n0.5,1\n0.7,x\n".as_bytes()).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    let err = parse_trace("0.5,1\n1.5,0\n".as_bytes()).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}
