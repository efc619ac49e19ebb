//! Data-driven selection of the regularization parameter.
//!
//! The radius of the distributional-uncertainty ball that a penalized fit
//! implicitly uses can be calibrated from the asymptotic law of a profile
//! statistic at the true parameter. That law has tractable stochastic upper
//! bounds built from the groupwise dual norm of a Gaussian vector, giving a
//! two-step recipe:
//!
//! 1. estimate the predictor covariance and the `1 - chi` quantile of the
//!    dual-norm law by Monte Carlo ([`estimate_covariance`],
//!    [`sample_dual_gaussian_norm`]);
//! 2. plug the quantile into a closed formula — [`lambda_linear`] (which
//!    additionally needs the first two absolute moments of the residuals
//!    from a pilot fit) or [`lambda_logistic`].
//!
//! [`select_lambda`] runs the whole recipe. [`sample_linear_exact_law`]
//! samples the exact (variational) linear-task law and exists to validate
//! the bound direction.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::linalg::psd_sqrt_factor;
use crate::norm::{dual_witness, group_norm, GroupPartition, NormSpec};
use crate::rng::{stream_rng, streams};
use crate::solvers::{fit_gsrl_linear, ModelFit, SolverOptions};

/// Which limit law a sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitLaw {
    /// Exact linear-task law: the variational maximum over directions.
    LinearExact,
    /// Squared groupwise dual norm of the Gaussian (linear-task bound,
    /// before the error-moment multiplier).
    DualNormSquared,
    /// Groupwise dual norm of the Gaussian (logistic-task bound).
    DualNorm,
}

#[derive(Debug, Clone)]
pub struct LimitLawSample {
    pub law: LimitLaw,
    pub draws: Vec<f64>,
    pub n_mc: usize,
    pub seed: u64,
    /// Per-draw inner maximizations that hit their iteration budget
    /// (only populated by the exact-law sampler).
    pub non_converged: usize,
}

/// Outcome of the two-step selection recipe.
#[derive(Debug, Clone)]
pub struct RwpiSelection {
    pub chi: f64,
    pub n_mc: usize,
    pub seed: u64,
    /// Estimated `1 - chi` quantile of the sampled law.
    pub eta_hat: f64,
    pub sigma_hat_cov: Array2<f64>,
    /// `(E|e|)^2 / E[e^2]` from the pilot residuals; linear task only.
    pub moment_ratio: Option<f64>,
    pub lambda: f64,
}

/// Column-centered sample covariance with denominator `n`, symmetrized.
pub fn estimate_covariance(x: &Array2<f64>) -> Result<Array2<f64>> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InvalidInput(
            "covariance estimation needs at least two rows".into(),
        ));
    }
    let d = x.ncols();
    let mean = x.mean_axis(ndarray::Axis(0)).expect("n >= 2");
    let mut centered = x.clone();
    for mut row in centered.rows_mut() {
        row -= &mean;
    }
    let cov = centered.t().dot(&centered) / n as f64;
    let mut sym = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            sym[[i, j]] = 0.5 * (cov[[i, j]] + cov[[j, i]]);
        }
    }
    Ok(sym)
}

/// Order-statistic quantile: the `ceil(level * n)`-th smallest draw.
/// No interpolation, so results are bit-reproducible.
pub fn quantile_order_statistic(draws: &[f64], level: f64) -> f64 {
    assert!(!draws.is_empty());
    assert!(level > 0.0 && level < 1.0);
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let idx = ((level * draws.len() as f64).ceil() as usize).clamp(1, draws.len());
    sorted[idx - 1]
}

/// Draws `Z ~ N(0, cov)` and records the groupwise norm of each draw under
/// `dual` (squared if requested). Deterministic for a fixed seed.
pub fn sample_dual_gaussian_norm(
    cov: &Array2<f64>,
    part: &GroupPartition,
    dual: &NormSpec,
    n_mc: usize,
    seed: u64,
    squared: bool,
) -> Result<LimitLawSample> {
    if n_mc == 0 {
        return Err(Error::InvalidInput("n_mc must be positive".into()));
    }
    let d = part.d();
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "covariance is {}x{} but the partition covers {d}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let factor = psd_sqrt_factor(cov)?;
    let mut rng = stream_rng(seed, streams::GAUSSIAN_NORM);
    let mut draws = Vec::with_capacity(n_mc);
    let mut xi = vec![0.0f64; d];
    let mut z = vec![0.0f64; d];
    for _ in 0..n_mc {
        for slot in xi.iter_mut() {
            *slot = rng.sample(StandardNormal);
        }
        for i in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += factor[[i, k]] * xi[k];
            }
            z[i] = acc;
        }
        let v = group_norm(&z, part, dual)?;
        draws.push(if squared { v * v } else { v });
    }
    Ok(LimitLawSample {
        law: if squared {
            LimitLaw::DualNormSquared
        } else {
            LimitLaw::DualNorm
        },
        draws,
        n_mc,
        seed,
        non_converged: 0,
    })
}

/// First two absolute residual moments `((1/n) sum |r_i|, (1/n) sum r_i^2)`
/// from a pilot fit. Errors when the pilot interpolates.
pub fn estimate_error_moments(data: &Dataset, pilot: &ModelFit) -> Result<(f64, f64)> {
    if data.task != Task::Linear {
        return Err(Error::InvalidInput(
            "residual moments are defined for the linear task".into(),
        ));
    }
    let r = &data.y - &data.x.dot(&pilot.beta);
    let n = data.n() as f64;
    let mean_abs = r.iter().map(|t| t.abs()).sum::<f64>() / n;
    let mean_sq = r.dot(&r) / n;
    if mean_sq <= 1e-24 {
        return Err(Error::DegenerateFit(
            "pilot residuals are identically zero".into(),
        ));
    }
    Ok((mean_abs, mean_sq))
}

/// Two-step formula for the linear task:
/// `lambda = sqrt(eta) / sqrt(n * (1 - (E|e|)^2 / E[e^2]))`.
///
/// `eta_hat_sq_quantile` is the estimated `1 - chi` quantile of the squared
/// dual-norm law. Requires `Var(|e|) > 0`.
pub fn lambda_linear(
    eta_hat_sq_quantile: f64,
    n: usize,
    mean_abs: f64,
    mean_sq: f64,
) -> Result<f64> {
    if eta_hat_sq_quantile < 0.0 {
        return Err(Error::InvalidInput("quantile must be nonnegative".into()));
    }
    if mean_sq <= 0.0 {
        return Err(Error::DegenerateErrors("E[e^2] must be positive".into()));
    }
    let ratio = mean_abs * mean_abs / mean_sq;
    if ratio >= 1.0 {
        return Err(Error::DegenerateErrors(format!(
            "(E|e|)^2 / E[e^2] = {ratio} leaves no spread in |e|"
        )));
    }
    Ok(eta_hat_sq_quantile.sqrt() / (n as f64 * (1.0 - ratio)).sqrt())
}

/// Two-step formula for the logistic task: `lambda = eta / sqrt(n)`.
pub fn lambda_logistic(eta_hat_quantile: f64, n: usize) -> f64 {
    eta_hat_quantile / (n as f64).sqrt()
}

/// Runs the full selection recipe on a dataset.
///
/// The penalty norm is the square-root-size inner-2 outer-1 norm, so the
/// sampled law uses its dual. For the linear task the residual moments come
/// from one pilot square-root fit at `lambda_0 = sqrt(eta / n)` (the value
/// the formula takes when the moment ratio vanishes), after which the ratio
/// is plugged in once. Deterministic given the seed.
pub fn select_lambda(data: &Dataset, chi: f64, n_mc: usize, seed: u64) -> Result<RwpiSelection> {
    if !(0.0 < chi && chi < 1.0) {
        return Err(Error::InvalidInput(format!(
            "chi must lie strictly between 0 and 1, got {chi}"
        )));
    }
    let cov = estimate_covariance(&data.x)?;
    let penalty = NormSpec::l21_sqrt_sizes(&data.part);
    let dual = penalty.dual();
    let n = data.n();
    match data.task {
        Task::Linear => {
            let sample = sample_dual_gaussian_norm(&cov, &data.part, &dual, n_mc, seed, true)?;
            let eta_hat = quantile_order_statistic(&sample.draws, 1.0 - chi);
            let lambda0 = (eta_hat / n as f64).sqrt();
            let pilot = fit_gsrl_linear(data, lambda0, &SolverOptions::default())?;
            let (mean_abs, mean_sq) = estimate_error_moments(data, &pilot)?;
            let lambda = lambda_linear(eta_hat, n, mean_abs, mean_sq)?;
            Ok(RwpiSelection {
                chi,
                n_mc,
                seed,
                eta_hat,
                sigma_hat_cov: cov,
                moment_ratio: Some(mean_abs * mean_abs / mean_sq),
                lambda,
            })
        }
        Task::Logistic => {
            let sample = sample_dual_gaussian_norm(&cov, &data.part, &dual, n_mc, seed, false)?;
            let eta_hat = quantile_order_statistic(&sample.draws, 1.0 - chi);
            Ok(RwpiSelection {
                chi,
                n_mc,
                seed,
                eta_hat,
                sigma_hat_cov: cov,
                moment_ratio: None,
                lambda: lambda_logistic(eta_hat, n),
            })
        }
    }
}

/// Samples the exact linear-task law
/// `max over directions of  2 sigma z'Z - mean_k || e_k z - (z'x_k) b* ||^2`
/// with the expectation replaced by the sample average over the provided
/// `(e, x)` pairs, solving each inner concave maximization by gradient
/// ascent with backtracking. `sigma^2` is the mean square of
/// `error_samples`. Used to validate that the tractable bound dominates.
#[allow(clippy::too_many_arguments)]
pub fn sample_linear_exact_law(
    beta_star: &Array1<f64>,
    error_samples: &[f64],
    x_samples: &Array2<f64>,
    part: &GroupPartition,
    spec: &NormSpec,
    n_mc: usize,
    seed: u64,
) -> Result<LimitLawSample> {
    if error_samples.is_empty() || x_samples.nrows() == 0 {
        return Err(Error::InvalidInput("need nonempty (e, X) samples".into()));
    }
    if x_samples.ncols() != part.d() || beta_star.len() != part.d() {
        return Err(Error::DimensionMismatch(
            "x samples / beta* vs partition".into(),
        ));
    }
    let d = part.d();
    let m = error_samples.len().min(x_samples.nrows());
    let sigma_sq = error_samples[..m].iter().map(|e| e * e).sum::<f64>() / m as f64;
    let sigma = sigma_sq.sqrt();
    let cov = estimate_covariance(x_samples)?;
    let factor = psd_sqrt_factor(&cov)?;
    let dual = spec.dual();

    // Quadratic part Q(zeta) = mean_k || e_k zeta - (zeta'x_k) b* ||^2 and,
    // on request, its gradient. The inner-2/outer-1 family (the one the
    // selection recipe uses) gets a direct, allocation-free subgradient;
    // other exponents go through the Hölder witness.
    let fast_l21 = matches!(spec.p, crate::norm::Exponent::Finite(p) if p == 2.0)
        && matches!(spec.s, crate::norm::Exponent::Finite(s) if s == 1.0);
    let x_flat = x_samples
        .as_standard_layout()
        .as_slice()
        .expect("standard layout")
        .to_vec();
    let quad = |zeta: &Array1<f64>, grad: Option<&mut Array1<f64>>| -> f64 {
        let mut q = 0.0;
        let want_grad = grad.is_some();
        let mut grad_buf = vec![0.0f64; if want_grad { d } else { 0 }];
        let mut v = vec![0.0f64; d];
        let mut u = vec![0.0f64; d];
        let zeta_s = zeta.as_slice().expect("contiguous");
        for k in 0..m {
            let e_k = error_samples[k];
            let x_k = &x_flat[k * d..(k + 1) * d];
            let mut c_k = 0.0;
            for i in 0..d {
                c_k += zeta_s[i] * x_k[i];
            }
            for i in 0..d {
                v[i] = e_k * zeta_s[i] - c_k * beta_star[i];
            }
            let norm_v;
            if fast_l21 {
                let mut acc = 0.0;
                for (g, &a) in part.groups().iter().zip(&spec.alpha) {
                    let block: f64 = g.iter().map(|&i| v[i] * v[i]).sum();
                    let block_norm = block.sqrt();
                    acc += a * block_norm;
                    if want_grad {
                        if block_norm > 0.0 {
                            let coef = a / block_norm;
                            for &i in g {
                                u[i] = coef * v[i];
                            }
                        } else {
                            for &i in g {
                                u[i] = 0.0;
                            }
                        }
                    }
                }
                norm_v = acc;
            } else {
                norm_v = group_norm(&v, part, spec).expect("dims checked");
                if want_grad {
                    if norm_v > 0.0 {
                        u.copy_from_slice(&dual_witness(&v, part, &dual).expect("nonzero"));
                    } else {
                        u.iter_mut().for_each(|t| *t = 0.0);
                    }
                }
            }
            q += norm_v * norm_v / m as f64;
            if want_grad && norm_v > 0.0 {
                let mut b_dot_u = 0.0;
                for i in 0..d {
                    b_dot_u += beta_star[i] * u[i];
                }
                let scale = 2.0 * norm_v / m as f64;
                for i in 0..d {
                    grad_buf[i] += scale * (e_k * u[i] - b_dot_u * x_k[i]);
                }
            }
        }
        if let Some(g) = grad {
            for i in 0..d {
                g[i] = grad_buf[i];
            }
        }
        q
    };

    // Q is 2-homogeneous, so along any ray the objective is r*L - r^2*Q with
    // a closed-form peak. Rescaling to that peak after every gradient step
    // removes the radial error entirely.
    let rescale = |zeta: Array1<f64>, z: &Array1<f64>| -> (Array1<f64>, f64) {
        let mut zeta = zeta;
        let mut linear = 2.0 * sigma * zeta.dot(z);
        if linear < 0.0 {
            zeta.mapv_inplace(|t| -t);
            linear = -linear;
        }
        let q = quad(&zeta, None);
        if q <= 1e-300 || linear == 0.0 {
            return (Array1::zeros(d), 0.0);
        }
        let r = linear / (2.0 * q);
        (zeta * r, linear * linear / (4.0 * q))
    };

    let mut rng = stream_rng(seed, streams::LIMIT_LAW);
    let mut draws = Vec::with_capacity(n_mc);
    let mut non_converged = 0usize;
    let mut xi = vec![0.0f64; d];
    const MAX_ASCENT: usize = 400;

    for _ in 0..n_mc {
        for slot in xi.iter_mut() {
            *slot = rng.sample(StandardNormal);
        }
        let z = Array1::from_iter((0..d).map(|i| {
            let mut acc = 0.0;
            for k in 0..d {
                acc += factor[[i, k]] * xi[k];
            }
            acc
        }));
        if z.iter().all(|t| *t == 0.0) {
            draws.push(0.0);
            continue;
        }
        // Start at the dual witness of Z: exact when b* = 0, a strong warm
        // start otherwise.
        let init = Array1::from(dual_witness(z.as_slice().unwrap(), part, spec).expect("z != 0"));
        let (mut zeta, mut value) = rescale(init, &z);
        let mut step = 1.0f64;
        let mut converged = false;
        let mut flat_rounds = 0u32;
        for _ in 0..MAX_ASCENT {
            let mut qgrad = Array1::zeros(d);
            quad(&zeta, Some(&mut qgrad));
            let g = &(&z * (2.0 * sigma)) - &qgrad;
            let gnorm_sq = g.dot(&g);
            if gnorm_sq <= 1e-18 * (1.0 + value.abs()) {
                converged = true;
                break;
            }
            let mut improvement = 0.0;
            for _ in 0..60 {
                let (cand, cand_value) = rescale(&zeta + &(&g * step), &z);
                if cand_value > value {
                    improvement = cand_value - value;
                    zeta = cand;
                    value = cand_value;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
                if step < 1e-18 {
                    break;
                }
            }
            if improvement <= 1e-9 * (1.0 + value.abs()) {
                flat_rounds += 1;
                if flat_rounds >= 2 {
                    converged = true;
                    break;
                }
            } else {
                flat_rounds = 0;
            }
        }
        if !converged {
            non_converged += 1;
        }
        draws.push(value);
    }

    Ok(LimitLawSample {
        law: LimitLaw::LinearExact,
        draws,
        n_mc,
        seed,
        non_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Exponent;
    use ndarray::array;

    #[test]
    fn covariance_edge_cases() {
        // Identical rows: zero covariance.
        let x = array![[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]];
        let c = estimate_covariance(&x).unwrap();
        assert!(c.iter().all(|t| t.abs() < 1e-15));
        // Two scalar points {0, 2}: variance 1 with denominator n.
        let x = array![[0.0], [2.0]];
        let c = estimate_covariance(&x).unwrap();
        assert!((c[[0, 0]] - 1.0).abs() < 1e-15);
        assert!(estimate_covariance(&array![[1.0, 2.0]]).is_err());
    }

    #[test]
    fn quantile_is_an_order_statistic() {
        let draws = [5.0, 1.0, 3.0, 2.0, 4.0];
        // ceil(0.5 * 5) = 3rd smallest.
        assert_eq!(quantile_order_statistic(&draws, 0.5), 3.0);
        assert_eq!(quantile_order_statistic(&draws, 0.95), 5.0);
        // Monotone in the level on a fixed draw set.
        let mut prev = f64::NEG_INFINITY;
        for level in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let q = quantile_order_statistic(&draws, level);
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn half_normal_quantile_matches() {
        let part = GroupPartition::singletons(1);
        let dual = NormSpec::new(vec![1.0], Exponent::Finite(2.0), Exponent::Infinity).unwrap();
        let cov = array![[1.0]];
        let sample = sample_dual_gaussian_norm(&cov, &part, &dual, 200_000, 11, false).unwrap();
        let q = quantile_order_statistic(&sample.draws, 0.95);
        // 0.975 standard-normal quantile; Monte Carlo error ~ 0.004.
        assert!((q - 1.959964).abs() < 0.02, "quantile {q}");
    }

    #[test]
    fn zero_covariance_gives_zero_draws() {
        let part = GroupPartition::singletons(2);
        let dual =
            NormSpec::new(vec![1.0, 1.0], Exponent::Finite(2.0), Exponent::Infinity).unwrap();
        let cov = Array2::zeros((2, 2));
        let sample = sample_dual_gaussian_norm(&cov, &part, &dual, 100, 3, false).unwrap();
        assert!(sample.draws.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn covariance_scaling_scales_draws_exactly() {
        let part = GroupPartition::contiguous(&[2, 1]).unwrap();
        let dual = NormSpec::l21_sqrt_sizes(&part).dual();
        let cov = array![[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 1.5]];
        let scaled = cov.mapv(|v| 4.0 * v);
        let a = sample_dual_gaussian_norm(&cov, &part, &dual, 500, 17, false).unwrap();
        let b = sample_dual_gaussian_norm(&scaled, &part, &dual, 500, 17, false).unwrap();
        for (x, y) in a.draws.iter().zip(b.draws.iter()) {
            assert_eq!(2.0 * x, *y, "power-of-two covariance scaling must be exact");
        }
        let asq = sample_dual_gaussian_norm(&cov, &part, &dual, 500, 17, true).unwrap();
        let bsq = sample_dual_gaussian_norm(&scaled, &part, &dual, 500, 17, true).unwrap();
        for (x, y) in asq.draws.iter().zip(bsq.draws.iter()) {
            assert_eq!(4.0 * x, *y);
        }
    }

    #[test]
    fn moment_formula_examples() {
        // Gaussian moments: ratio 2/pi.
        let mean_abs = (2.0 / std::f64::consts::PI).sqrt();
        let lambda = lambda_linear(4.0, 100, mean_abs, 1.0).unwrap();
        assert!((lambda - 0.331_779_347_994_061_2).abs() < 1e-12, "{lambda}");
        // Ratio -> 0 limit.
        let l0 = lambda_linear(4.0, 100, 0.0, 1.0).unwrap();
        assert!((l0 - (4.0f64 / 100.0).sqrt()).abs() < 1e-15);
        // Rademacher residuals: |e| is constant, the formula degenerates.
        assert!(matches!(
            lambda_linear(4.0, 100, 1.0, 1.0),
            Err(Error::DegenerateErrors(_))
        ));
        assert_eq!(lambda_logistic(2.0, 4), 1.0);
        assert_eq!(lambda_logistic(0.0, 4), 0.0);
        assert!((lambda_logistic(3.0, 10_000) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn residual_moments() {
        let part = GroupPartition::singletons(1);
        let x = array![[1.0], [1.0]];
        let y = array![1.0, -1.0];
        let data = Dataset::new(x, y, part, Task::Linear).unwrap();
        let pilot = ModelFit {
            beta: array![0.0],
            lambda: 0.0,
            sigma_hat: None,
            iterations: 0,
            converged: true,
            objective: 0.0,
            trace: vec![],
        };
        let (mean_abs, mean_sq) = estimate_error_moments(&data, &pilot).unwrap();
        assert_eq!((mean_abs, mean_sq), (1.0, 1.0));
        // Exact fit -> degenerate.
        let exact = ModelFit {
            beta: array![1.0],
            ..pilot
        };
        let data2 = Dataset::new(
            array![[1.0], [1.0]],
            array![1.0, 1.0],
            GroupPartition::singletons(1),
            Task::Linear,
        )
        .unwrap();
        assert!(estimate_error_moments(&data2, &exact).is_err());
    }

    #[test]
    fn exact_law_matches_closed_form_at_zero_beta() {
        // With b* = 0 the inner problem is 2 sigma z'Z - E[e^2] ||z||^2,
        // whose optimum is sigma^2 ||Z||_dual^2 / E[e^2].
        let part = GroupPartition::contiguous(&[2, 2]).unwrap();
        let spec = NormSpec::l21_sqrt_sizes(&part);
        let mut rng = stream_rng(5, 99);
        let errors: Vec<f64> = (0..200)
            .map(|_| 0.5 + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let xs = Array2::from_shape_fn((200, 4), |_| rng.sample::<f64, _>(StandardNormal));
        let beta_star = Array1::zeros(4);
        let n_draws = 40;
        let sample =
            sample_linear_exact_law(&beta_star, &errors, &xs, &part, &spec, n_draws, 21).unwrap();
        assert_eq!(sample.non_converged, 0);

        // Replay the same Gaussian draws to evaluate the closed form.
        let m = errors.len();
        let sigma_sq = errors.iter().map(|e| e * e).sum::<f64>() / m as f64;
        let cov = estimate_covariance(&xs).unwrap();
        let factor = psd_sqrt_factor(&cov).unwrap();
        let dual = spec.dual();
        let mut check_rng = stream_rng(21, streams::LIMIT_LAW);
        for draw_value in sample.draws.iter().take(n_draws) {
            let xi: Vec<f64> = (0..4)
                .map(|_| check_rng.sample::<f64, _>(StandardNormal))
                .collect();
            let z: Vec<f64> = (0..4)
                .map(|i| (0..4).map(|k| factor[[i, k]] * xi[k]).sum())
                .collect();
            let dn = group_norm(&z, &part, &dual).unwrap();
            let closed = sigma_sq * dn * dn / sigma_sq.max(1e-300);
            assert!(
                (draw_value - closed).abs() <= 1e-4 * closed.max(1.0),
                "ascent {draw_value} vs closed {closed}"
            );
        }
    }

    #[test]
    fn zero_gaussian_draws_give_zero_values() {
        let part = GroupPartition::singletons(2);
        let spec = NormSpec::l21_sqrt_sizes(&part);
        let errors = vec![1.0, -1.0, 0.5, -0.5];
        let beta_star = array![0.3, -0.2];
        // Zero covariance makes every Z draw zero, so the optimum is 0.
        let zero_xs = Array2::zeros((4, 2));
        let sample =
            sample_linear_exact_law(&beta_star, &errors, &zero_xs, &part, &spec, 5, 2).unwrap();
        assert!(sample.draws.iter().all(|v| v.abs() < 1e-12));
    }
}
