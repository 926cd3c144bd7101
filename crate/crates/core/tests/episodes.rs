use approx::assert_abs_diff_eq;
use hil_core::analytics::{mean_stderr, monte_carlo, run_episode, summarize};
use hil_core::environment::{make_stream, ArrivalProcess};
use hil_core::policies::{
    AlwaysAccept, AlwaysOffload, CostMode, OptimalPolicy, PolicyConfig, PolicyKind,
};
use hil_core::{reference_instance, CostModel, Decision, InstanceSpec};

fn replay(rows: &[(usize, bool)]) -> ArrivalProcess {
    ArrivalProcess::TraceReplay(rows.to_vec())
}

#[test]
fn always_offload_hand_replay() {
    let inst = reference_instance();
    let rows = [
        (0, true),
        (3, true),
        (5, false),
        (7, true),
        (1, false),
        (4, true),
        (6, true),
        (2, true),
        (3, false),
        (7, true),
    ];
    let stream = make_stream(&inst, &replay(&rows), 0, rows.len()).unwrap();
    let ep = run_episode(&mut AlwaysOffload, &inst, &stream).unwrap();
    // Only Φ_H rounds (bins 3..8) contribute 0.5 − (1 − correct).
    let expected = [0.0, 0.5, 0.0, 0.5, 0.5, 1.0, 1.5, 1.5, 1.0, 1.5];
    for (r, e) in ep.regret.iter().zip(expected) {
        assert_abs_diff_eq!(*r, e, epsilon = 1e-12);
    }
    assert_eq!(ep.offloads_per_bin, vec![1, 1, 1, 2, 1, 1, 1, 2]);
    assert!(ep.accepts_per_bin.iter().all(|&a| a == 0));
}

#[test]
fn four_round_summary() {
    let inst = reference_instance();
    let rows = [(0, false), (3, true), (5, false), (1, true)];
    let stream = make_stream(&inst, &replay(&rows), 0, 4).unwrap();
    let ep = run_episode(&mut OptimalPolicy::new(&inst), &inst, &stream).unwrap();
    let s = ep.summary();
    // Offloads bins 0 and 1; accepts one correct and one wrong sample.
    assert_eq!(s.offload_frac, 0.5);
    assert_eq!(s.accuracy, 0.75);

    let ep = run_episode(&mut AlwaysAccept, &inst, &stream).unwrap();
    assert_eq!(ep.summary().offload_frac, 0.0);
    assert_eq!(ep.summary().accuracy, 0.5);
    let both = summarize(&[ep.clone(), ep]).unwrap();
    assert_eq!(both.accuracy, 0.5);
    assert!(summarize(&[]).is_none());
}

#[test]
fn optimal_has_zero_regret_and_offload_is_exact() {
    let inst = reference_instance().with_cost(CostModel::bimodal());
    let arrivals = ArrivalProcess::from_instance(&inst).unwrap();
    let stream = make_stream(&inst, &arrivals, 4, 10_000).unwrap();
    let ep = run_episode(&mut OptimalPolicy::new(&inst), &inst, &stream).unwrap();
    assert!(ep.regret.iter().all(|&r| r == 0.0));

    let ep = run_episode(&mut AlwaysOffload, &inst, &stream).unwrap();
    assert_eq!(ep.summary().offload_frac, 1.0);
    assert_eq!(ep.summary().accuracy, 1.0);
}

#[test]
fn perfect_local_model_regret_is_offload_spend() {
    let inst = InstanceSpec::uniform(vec![1.0; 4], CostModel::bimodal()).unwrap();
    let arrivals = ArrivalProcess::from_instance(&inst).unwrap();
    let stream = make_stream(&inst, &arrivals, 6, 5_000).unwrap();
    let mut p = PolicyConfig::hi_lcb(0.52, CostMode::Iid).build(&inst, 6).unwrap();
    let ep = run_episode(p.as_mut(), &inst, &stream).unwrap();
    let spend: f64 = stream
        .rounds()
        .iter()
        .zip(&ep.decisions)
        .filter(|(_, d)| d.is_offload())
        .map(|(r, _)| r.cost)
        .sum();
    assert_abs_diff_eq!(ep.total_regret(), spend, epsilon = 1e-9);
    assert!(ep.optimal_decisions.iter().all(|&d| d == Decision::Accept));
}

#[test]
fn regret_is_the_difference_of_recomputed_losses() {
    let inst = reference_instance().with_cost(CostModel::bimodal());
    let arrivals = ArrivalProcess::from_instance(&inst).unwrap();
    let stream = make_stream(&inst, &arrivals, 9, 20_000).unwrap();
    let mut p = PolicyConfig::hi_lcb_lite(0.52, CostMode::Iid).build(&inst, 9).unwrap();
    let ep = run_episode(p.as_mut(), &inst, &stream).unwrap();
    let loss = |r: &hil_core::environment::Round, d: Decision| match d {
        Decision::Offload => r.cost,
        Decision::Accept => f64::from(u8::from(!r.correct)),
    };
    let (mut a, mut b) = (0.0, 0.0);
    for (n, r) in stream.rounds().iter().enumerate() {
        a += loss(r, ep.decisions[n]);
        b += loss(r, ep.optimal_decisions[n]);
        assert_abs_diff_eq!(ep.regret[n], a - b, epsilon = 1e-9);
        assert_eq!(ep.regret[n], ep.cumulative_loss[n] - ep.cumulative_optimal_loss[n]);
    }
    let arrived: Vec<u64> = (0..8)
        .map(|i| stream.rounds().iter().filter(|r| r.phi_index == i).count() as u64)
        .collect();
    let counted: Vec<u64> = ep
        .offloads_per_bin
        .iter()
        .zip(&ep.accepts_per_bin)
        .map(|(o, a)| o + a)
        .collect();
    assert_eq!(counted, arrived);
}

#[test]
fn grid_mismatch_is_rejected() {
    let inst = reference_instance();
    let other = InstanceSpec::uniform(vec![0.5; 4], CostModel::fixed(0.5).unwrap()).unwrap();
    let arrivals = ArrivalProcess::from_instance(&other).unwrap();
    let stream = make_stream(&other, &arrivals, 0, 10).unwrap();
    assert!(run_episode(&mut AlwaysOffload, &inst, &stream).is_err());
}

#[test]
fn one_seed_has_no_stderr_and_duplicates_agree() {
    let inst = reference_instance();
    let arrivals = ArrivalProcess::from_instance(&inst).unwrap();
    let cfg = PolicyConfig::hi_lcb(0.52, CostMode::Fixed);
    let one = monte_carlo(&inst, &arrivals, &cfg, &[5], 2_000, &[1_000, 2_000]).unwrap();
    assert!(one.rows.iter().all(|r| r.stderr.is_none() && r.seeds == 1));

    let twice = monte_carlo(&inst, &arrivals, &cfg, &[5, 5], 2_000, &[1_000, 2_000]).unwrap();
    for (a, b) in one.rows.iter().zip(&twice.rows) {
        assert_eq!(a.mean_regret, b.mean_regret);
        assert_eq!(b.stderr, Some(0.0));
    }
    assert!(monte_carlo(&inst, &arrivals, &cfg, &[], 10, &[10]).is_err());
    assert!(monte_carlo(&inst, &arrivals, &cfg, &[1], 10, &[20]).is_err());
    assert!(monte_carlo(&inst, &arrivals, &cfg, &[1], 10, &[5, 5]).is_err());
}

#[test]
fn mean_regret_is_not_significantly_negative() {
    let inst = reference_instance().with_cost(CostModel::bimodal());
    let arrivals = ArrivalProcess::from_instance(&inst).unwrap();
    let seeds: Vec<u64> = (0..100).collect();
    for kind in [PolicyKind::HiLcb, PolicyKind::HiLcbLite, PolicyKind::Hedge] {
        let cfg = PolicyConfig {
            horizon_hint: Some(5_000),
            ..PolicyConfig::new(kind)
        };
        let agg =
            monte_carlo(&inst, &arrivals, &cfg, &seeds, 5_000, &[100, 1_000, 5_000]).unwrap();
        for r in &agg.rows {
            assert!(r.mean_regret >= -3.0 * r.stderr.unwrap(), "{kind:?} at {}", r.t);
        }
    }
}

#[test]
fn stderr_formula() {
    let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert_abs_diff_eq!(se.unwrap(), (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-15);
}
