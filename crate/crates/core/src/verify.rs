//! Seeded verification suites: norm duality, worst-case-loss duality, and
//! limit-law dominance on random instances. The command-line front end
//! prints one line per check; tests drive the same machinery.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::adversary::{adversary_lower_bound, worst_case_linear, worst_case_logistic};
use crate::data::{simulate, SimulationConfig};
use crate::dataset::{Dataset, Task};
use crate::error::Result;
use crate::norm::{dual_witness, group_norm, Exponent, GroupPartition, NormSpec};
use crate::rng::{stream_rng, streams};
use crate::rwpi::{quantile_order_statistic, sample_dual_gaussian_norm, sample_linear_exact_law};
use crate::transport::{CostExponent, CostSpec};

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckReport {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Distribution-free standard error of an order-statistic quantile: half
/// the spread between the order statistics one binomial standard deviation
/// to each side.
pub fn quantile_standard_error(draws: &[f64], level: f64) -> f64 {
    let n = draws.len();
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let k = ((level * n as f64).ceil() as usize).clamp(1, n);
    let spread = (n as f64 * level * (1.0 - level)).sqrt().ceil() as usize;
    let hi = (k + spread).min(n) - 1;
    let lo = k.saturating_sub(spread + 1);
    0.5 * (sorted[hi] - sorted[lo])
}

/// One worst-case-duality comparison; exposing the two radii separately
/// lets negative controls inject a mismatch.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub closed_form: f64,
    pub adversary_value: f64,
    pub relative_gap: f64,
    /// Adversary never exceeds the closed form (by more than 1e-6).
    pub weak_ok: bool,
}

pub fn linear_gap_report(
    data: &Dataset,
    beta: &Array1<f64>,
    delta_closed: f64,
    delta_adversary: f64,
    iters: usize,
    seed: u64,
) -> Result<GapReport> {
    let spec = NormSpec::l21_sqrt_sizes(&data.part);
    let cost = CostSpec::default_for(&data.part, CostExponent::Two);
    let closed = worst_case_linear(data, beta, delta_closed, &spec)?;
    let adv = adversary_lower_bound(data, beta, delta_adversary, &cost, iters, seed)?;
    Ok(GapReport {
        closed_form: closed,
        adversary_value: adv.value,
        relative_gap: (closed - adv.value).abs() / closed.max(1e-12),
        weak_ok: adv.value <= closed + 1e-6,
    })
}

pub fn logistic_gap_report(
    data: &Dataset,
    beta: &Array1<f64>,
    delta: f64,
    iters: usize,
    seed: u64,
) -> Result<GapReport> {
    let spec = NormSpec::l21_sqrt_sizes(&data.part);
    let cost = CostSpec::default_for(&data.part, CostExponent::One);
    let closed = worst_case_logistic(data, beta, delta, &spec)?;
    let adv = adversary_lower_bound(data, beta, delta, &cost, iters, seed)?;
    Ok(GapReport {
        closed_form: closed,
        adversary_value: adv.value,
        relative_gap: (closed - adv.value).abs() / closed.max(1e-12),
        weak_ok: adv.value <= closed + 1e-6,
    })
}

/// Random partition with 2..=4 groups of sizes 1..=3 and a random instance
/// on it.
fn random_instance(rng: &mut rand_chacha::ChaCha8Rng, task: Task) -> (Dataset, Array1<f64>) {
    let n_groups = rng.random_range(2..=4usize);
    let sizes: Vec<usize> = (0..n_groups).map(|_| rng.random_range(1..=3usize)).collect();
    let part = GroupPartition::contiguous(&sizes).unwrap();
    let d = part.d();
    let n = rng.random_range(10..=50usize);
    let x = Array2::from_shape_fn((n, d), |_| rng.sample::<f64, _>(StandardNormal));
    let beta_true = Array1::from_shape_fn(d, |_| rng.sample::<f64, _>(StandardNormal));
    let y = match task {
        Task::Linear => Array1::from_shape_fn(n, |i| {
            x.row(i).dot(&beta_true) + rng.sample::<f64, _>(StandardNormal)
        }),
        Task::Logistic => Array1::from_shape_fn(n, |i| {
            let p = 1.0 / (1.0 + (-x.row(i).dot(&beta_true)).exp());
            if rng.random::<f64>() < p {
                1.0
            } else {
                -1.0
            }
        }),
    };
    let beta_eval = Array1::from_shape_fn(d, |_| rng.sample::<f64, _>(StandardNormal));
    (Dataset::new(x, y, part, task).unwrap(), beta_eval)
}

/// Norm duality on random triples: Hölder bound, witness equality,
/// triangle inequality with colinear equality, dual-of-dual value
/// round-trip.
pub fn norm_duality_checks(seed: u64, cases: usize) -> Vec<CheckReport> {
    let mut rng = stream_rng(seed, streams::VERIFY);
    let exponents = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
    let mut worst_holder: f64 = 0.0;
    let mut worst_witness: f64 = 0.0;
    let mut worst_triangle: f64 = 0.0;
    let mut worst_colinear: f64 = 0.0;
    let mut worst_roundtrip: f64 = 0.0;
    for _ in 0..cases {
        let n_groups = rng.random_range(2..=4usize);
        let sizes: Vec<usize> = (0..n_groups).map(|_| rng.random_range(1..=3usize)).collect();
        let part = GroupPartition::contiguous(&sizes).unwrap();
        let d = part.d();
        let alpha: Vec<f64> = (0..n_groups).map(|_| rng.random_range(0.3..3.0)).collect();
        let p = Exponent::new(exponents[rng.random_range(0..exponents.len())]).unwrap();
        let s = Exponent::new(exponents[rng.random_range(0..exponents.len())]).unwrap();
        let spec = NormSpec::new(alpha, p, s).unwrap();
        let dual = spec.dual();
        let a: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let b: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();

        let norm_a = group_norm(&a, &part, &spec).unwrap();
        let dual_b = group_norm(&b, &part, &dual).unwrap();
        let inner: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        worst_holder = worst_holder.max(inner - norm_a * dual_b);

        let witness = dual_witness(&b, &part, &spec).unwrap();
        let attained: f64 = witness.iter().zip(&b).map(|(x, y)| x * y).sum();
        worst_witness =
            worst_witness.max((attained - dual_b).abs() / dual_b.max(1e-12));

        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let norm_b = group_norm(&b, &part, &spec).unwrap();
        let norm_sum = group_norm(&sum, &part, &spec).unwrap();
        worst_triangle = worst_triangle.max(norm_sum - norm_a - norm_b);

        let tau: f64 = rng.random_range(0.0..2.0);
        let colinear: Vec<f64> = a.iter().map(|x| (1.0 + tau) * x).collect();
        let norm_colinear = group_norm(&colinear, &part, &spec).unwrap();
        worst_colinear =
            worst_colinear.max((norm_colinear - (1.0 + tau) * norm_a).abs());

        let roundtrip = group_norm(&a, &part, &dual.dual()).unwrap();
        worst_roundtrip =
            worst_roundtrip.max((roundtrip - norm_a).abs() / norm_a.max(1e-12));
    }
    vec![
        CheckReport::new(
            "holder-inequality",
            worst_holder <= 1e-10,
            format!("max a'b - ||a||*||b||_dual = {worst_holder:.3e}"),
        ),
        CheckReport::new(
            "witness-equality",
            worst_witness <= 1e-9,
            format!("max relative witness defect = {worst_witness:.3e}"),
        ),
        CheckReport::new(
            "triangle-inequality",
            worst_triangle <= 1e-10,
            format!("max ||a+b|| - ||a|| - ||b|| = {worst_triangle:.3e}"),
        ),
        CheckReport::new(
            "colinear-equality",
            worst_colinear <= 1e-12 * 100.0,
            format!("max colinear defect = {worst_colinear:.3e}"),
        ),
        CheckReport::new(
            "dual-of-dual",
            worst_roundtrip <= 1e-9,
            format!("max relative round-trip defect = {worst_roundtrip:.3e}"),
        ),
    ]
}

/// Worst-case duality on random linear instances: weak duality everywhere
/// and a tight gap.
pub fn linear_duality_checks(seed: u64, instances: usize, iters: usize) -> Vec<CheckReport> {
    let mut rng = stream_rng(seed, streams::VERIFY.wrapping_add(100));
    let mut worst_gap: f64 = 0.0;
    let mut weak_ok = true;
    for i in 0..instances {
        let (data, beta) = random_instance(&mut rng, Task::Linear);
        for delta in [0.01, 0.1, 1.0] {
            let report =
                linear_gap_report(&data, &beta, delta, delta, iters, seed ^ i as u64).unwrap();
            weak_ok &= report.weak_ok;
            worst_gap = worst_gap.max(report.relative_gap);
        }
    }
    vec![
        CheckReport::new(
            "linear-weak-duality",
            weak_ok,
            "adversary <= closed form + 1e-6 on all instances".into(),
        ),
        CheckReport::new(
            "linear-duality-gap",
            worst_gap <= 1e-3,
            format!("max relative gap = {worst_gap:.3e}"),
        ),
    ]
}

/// Weak duality and small-radius tightness for random logistic instances.
pub fn logistic_duality_checks(seed: u64, instances: usize, iters: usize) -> Vec<CheckReport> {
    let mut rng = stream_rng(seed, streams::VERIFY.wrapping_add(200));
    let mut weak_ok = true;
    let mut worst_small_gap: f64 = 0.0;
    for i in 0..instances {
        let (data, beta) = random_instance(&mut rng, Task::Logistic);
        for delta in [0.01, 0.1, 1.0] {
            let report = logistic_gap_report(&data, &beta, delta, iters, seed ^ i as u64).unwrap();
            weak_ok &= report.weak_ok;
            if delta == 0.01 {
                worst_small_gap = worst_small_gap.max(report.relative_gap);
            }
        }
    }
    vec![
        CheckReport::new(
            "logistic-weak-duality",
            weak_ok,
            "adversary <= closed form + 1e-6 on all instances".into(),
        ),
        CheckReport::new(
            "logistic-small-radius-gap",
            worst_small_gap <= 5e-2,
            format!("max relative gap at delta=0.01 = {worst_small_gap:.3e}"),
        ),
    ]
}

/// The exact linear law never exceeds its tractable bound at the checked
/// quantiles (allowing twice the combined Monte Carlo error).
pub fn dominance_check(seed: u64, draws: usize) -> Vec<CheckReport> {
    let mut config = SimulationConfig::new(300, seed, Task::Linear);
    config.n_covariates = 4;
    config.active_groups = vec![1, 3];
    let (data, beta_star) = simulate(&config).unwrap();
    let errors: Vec<f64> = (0..data.n())
        .map(|i| data.y[i] - data.x.row(i).dot(&beta_star))
        .collect();
    let spec = NormSpec::l21_sqrt_sizes(&data.part);
    let exact =
        sample_linear_exact_law(&beta_star, &errors, &data.x, &data.part, &spec, draws, seed)
            .unwrap();
    let mean_sq: f64 = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
    let mean_abs: f64 = errors.iter().map(|e| e.abs()).sum::<f64>() / errors.len() as f64;
    let multiplier = mean_sq / (mean_sq - mean_abs * mean_abs);
    let cov = crate::rwpi::estimate_covariance(&data.x).unwrap();
    let bound_sample =
        sample_dual_gaussian_norm(&cov, &data.part, &spec.dual(), draws, seed, true).unwrap();
    let bound_draws: Vec<f64> = bound_sample.draws.iter().map(|v| multiplier * v).collect();

    let mut reports = Vec::new();
    for level in [0.5, 0.9, 0.95] {
        let qa = quantile_order_statistic(&exact.draws, level);
        let qb = quantile_order_statistic(&bound_draws, level);
        let se = (quantile_standard_error(&exact.draws, level).powi(2)
            + quantile_standard_error(&bound_draws, level).powi(2))
        .sqrt();
        let ok = qa <= qb + 2.0 * se;
        reports.push(CheckReport::new(
            &format!("dominance-q{level}"),
            ok,
            format!("exact {qa:.4} vs bound {qb:.4} (2se = {:.4})", 2.0 * se),
        ));
    }
    reports
}

/// The full suite at CLI scale. `quick` trims the instance counts to run
/// in a few seconds.
pub fn run_all(seed: u64, quick: bool) -> Vec<CheckReport> {
    let (norm_cases, duality_instances, iters, dominance_draws) = if quick {
        (200, 5, 1500, 150)
    } else {
        (1000, 20, 4000, 500)
    };
    let mut reports = norm_duality_checks(seed, norm_cases);
    reports.extend(linear_duality_checks(seed, duality_instances, iters));
    reports.extend(logistic_duality_checks(seed, duality_instances, iters));
    reports.extend(dominance_check(seed, dominance_draws));
    reports
}
