#![allow(dead_code)]

use hil_core::{AccuracyProfile, ConfidenceGrid, CostModel, InstanceSpec};
use rand::Rng;

/// Random monotone instance with `1..=max_bins` bins, strictly positive
/// weights and a fixed cost in `[0.05, 0.95]`.
pub fn random_monotone_instance<R: Rng>(rng: &mut R, max_bins: usize) -> InstanceSpec {
    let k = rng.random_range(1..=max_bins);
    let mut f: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    f.sort_by(f64::total_cmp);
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // Push rounding residue into the last weight so the sum is 1 to ~1 ulp.
    let head: f64 = weights[..k - 1].iter().sum();
    weights[k - 1] = 1.0 - head;
    let gamma = rng.random_range(0.05..0.95);
    InstanceSpec::new(
        ConfidenceGrid::uniform(k).unwrap(),
        AccuracyProfile::monotone(f).unwrap(),
        Some(weights),
        CostModel::fixed(gamma).unwrap(),
    )
    .unwrap()
}

/// `|x − mean| ≤ 3 · sqrt(var / n)`.
pub fn within_3se(x: f64, mean: f64, var: f64, n: f64) -> bool {
    (x - mean).abs() <= 3.0 * (var / n).sqrt()
}
