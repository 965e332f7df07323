//! Soft-truncation robust mean estimation and its private variant.
//!
//! The estimator rescales each sample by `s`, pushes it through the bounded
//! odd influence function [`phi`], multiplies by Gaussian noise `1 + eta`,
//! and smooths that noise analytically. The smoothed per-sample expectation
//! has the closed form
//!
//! ```text
//! E phi(a + b g) = a (1 - b^2/2) - a^3/6 + C(a, b),   g ~ N(0, 1)
//! ```
//!
//! where [`correction_c`] is a five-term expression in the normal CDF.
//! Because `|phi| <= 2 sqrt(2)/3`, swapping one sample moves the estimate by
//! at most `(s/n) * 4 sqrt(2)/3`, which makes a Gaussian-mechanism release
//! ([`private_mean`]) straightforward to calibrate.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric::normal_cdf;
use crate::rng::SeededRng;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const PHI_BOUND: f64 = 2.0 * SQRT_2 / 3.0;

/// Which failure-probability convention sets the smoothing parameter `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMode {
    /// `beta = 2 ln(1/delta')`, the concentration-lemma convention.
    Lemma5,
    /// `beta = ln(1/delta')`, the optimizer convention (default).
    Alg4,
}

/// Parameters of the soft-truncation estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatoniConfig {
    /// Known upper bound on the second moment `E x^2`.
    pub v: f64,
    /// Failure probability `delta'` in (0, 1).
    pub delta_prime: f64,
    pub beta_mode: BetaMode,
    /// Sample count the scale is calibrated for.
    pub n: usize,
}

impl CatoniConfig {
    pub fn new(v: f64, delta_prime: f64, beta_mode: BetaMode, n: usize) -> Result<Self> {
        let cfg = Self {
            v,
            delta_prime,
            beta_mode,
            n,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) {
            return Err(Error::config(format!("second-moment bound v must be > 0, got {}", self.v)));
        }
        if !(self.delta_prime > 0.0 && self.delta_prime < 1.0) {
            return Err(Error::config(format!(
                "delta' must lie in (0,1), got {}",
                self.delta_prime
            )));
        }
        if self.n == 0 {
            return Err(Error::config("sample count n must be >= 1"));
        }
        Ok(())
    }

    /// Truncation scale `s = sqrt(n v / (2 ln(1/delta')))`.
    pub fn scale(&self) -> f64 {
        let log_inv = (1.0 / self.delta_prime).ln();
        (self.n as f64 * self.v / (2.0 * log_inv)).sqrt()
    }

    /// Noise-smoothing parameter `beta` per the selected convention.
    pub fn beta(&self) -> f64 {
        let log_inv = (1.0 / self.delta_prime).ln();
        match self.beta_mode {
            BetaMode::Lemma5 => 2.0 * log_inv,
            BetaMode::Alg4 => log_inv,
        }
    }
}

/// Odd soft-truncation influence function: `x - x^3/6` on `[-sqrt 2, sqrt 2]`,
/// saturating at `+-2 sqrt(2)/3` outside.
pub fn phi(x: f64) -> f64 {
    if x > SQRT_2 {
        PHI_BOUND
    } else if x < -SQRT_2 {
        -PHI_BOUND
    } else {
        x - x * x * x / 6.0
    }
}

/// Smoothing correction `C(a, b)` with `b >= 0`, satisfying
/// `E phi(a + b g) = a(1 - b^2/2) - a^3/6 + C(a, b)`.
///
/// At `b = 0` the correction is defined by its limit: `0` for `|a| <= sqrt 2`
/// and `sign(a) * 2 sqrt(2)/3 - a + a^3/6` beyond the truncation point.
pub fn correction_c(a: f64, b: f64) -> Result<f64> {
    if b < 0.0 {
        return Err(Error::domain(format!("correction_c requires b >= 0, got {b}")));
    }
    if b == 0.0 {
        return Ok(if a > SQRT_2 {
            PHI_BOUND - a + a * a * a / 6.0
        } else if a < -SQRT_2 {
            -PHI_BOUND - a + a * a * a / 6.0
        } else {
            0.0
        });
    }

    let v_minus = (SQRT_2 - a) / b;
    let v_plus = (SQRT_2 + a) / b;
    let f_minus = normal_cdf(-v_minus);
    let f_plus = normal_cdf(-v_plus);
    let e_minus = (-0.5 * v_minus * v_minus).exp();
    let e_plus = (-0.5 * v_plus * v_plus).exp();
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();

    let t1 = PHI_BOUND * (f_minus - f_plus);
    let t2 = -(a - a * a * a / 6.0) * (f_minus + f_plus);
    let t3 = b * inv_sqrt_2pi * (1.0 - a * a / 2.0) * (e_plus - e_minus);
    let t4 = 0.5 * a * b * b
        * (f_plus + f_minus + inv_sqrt_2pi * (v_plus * e_plus + v_minus * e_minus));
    let t5 = b * b * b / 6.0 * inv_sqrt_2pi
        * ((2.0 + v_minus * v_minus) * e_minus - (2.0 + v_plus * v_plus) * e_plus);

    Ok(t1 + t2 + t3 + t4 + t5)
}

/// `E phi(a + b g)` for `g ~ N(0, 1)`, evaluated stably across regimes.
///
/// The closed form `a(1 - b^2/2) - a^3/6 + C(a, b)` cancels catastrophically
/// once the cubic terms dwarf the bounded result, so for large `a` or `b`
/// the expectation is assembled directly: saturated tail masses through the
/// normal CDF plus Gauss-Legendre quadrature of the cubic branch.
pub(crate) fn smoothed_phi_mean(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return phi(a);
    }
    if a.abs() <= 30.0 && b <= 30.0 {
        return a * (1.0 - b * b / 2.0) - a * a * a / 6.0
            + correction_c(a, b).expect("b > 0");
    }
    let g_lo = (-SQRT_2 - a) / b;
    let g_hi = (SQRT_2 - a) / b;
    let tails = PHI_BOUND * (normal_cdf(-g_hi) - normal_cdf(g_lo));
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut inner = 0.0;
    for &(node, weight) in crate::numeric::gauss_legendre_64() {
        let u = SQRT_2 * node;
        let g = (u - a) / b;
        inner += weight * (u - u * u * u / 6.0) * (-0.5 * g * g).exp();
    }
    tails + inner * SQRT_2 * inv_sqrt_2pi / b
}

/// Per-sample contribution to [`catoni_mean`]; exposed at crate level so
/// sensitivity experiments can swap one sample in O(1).
pub(crate) fn catoni_term(x: f64, s: f64, beta: f64) -> f64 {
    s * smoothed_phi_mean(x / s, x.abs() / (s * beta.sqrt()))
}

/// Smoothed soft-truncation mean estimate:
/// `(1/n) sum_i [x_i (1 - x_i^2/(2 s^2 beta)) - x_i^3/(6 s^2)]
///  + (s/n) sum_i C(x_i/s, |x_i|/(s sqrt(beta)))`,
/// equal to `(s/n) sum_i E phi(x_i (1 + eta_i) / s)` with
/// `eta ~ N(0, 1/beta)`. Extreme samples take the saturated-tail evaluation
/// path of [`smoothed_phi_mean`] for numerical stability.
pub fn catoni_mean(samples: &[f64], cfg: &CatoniConfig) -> Result<f64> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::domain("catoni_mean requires a nonempty sample list"));
    }
    if samples.len() != cfg.n {
        return Err(Error::domain(format!(
            "config is calibrated for n = {} but {} samples were given",
            cfg.n,
            samples.len()
        )));
    }
    let s = cfg.scale();
    let beta = cfg.beta();
    let sum: f64 = samples.iter().map(|&x| catoni_term(x, s, beta)).sum();
    Ok(sum / cfg.n as f64)
}

/// L2 sensitivity of [`catoni_mean`] to a one-sample swap: `(s/n) 4 sqrt(2)/3`.
pub fn catoni_sensitivity(cfg: &CatoniConfig) -> f64 {
    cfg.scale() / cfg.n as f64 * 2.0 * PHI_BOUND
}

/// Gaussian-mechanism release of the estimate. The caller supplies the noise
/// scale from the accounting module so calibration stays auditable there.
pub fn private_mean(
    samples: &[f64],
    cfg: &CatoniConfig,
    noise_sigma: f64,
    rng: &mut SeededRng,
) -> Result<f64> {
    if noise_sigma < 0.0 {
        return Err(Error::domain(format!(
            "noise_sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let base = catoni_mean(samples, cfg)?;
    let z: f64 = rng.sample(StandardNormal);
    Ok(base + noise_sigma * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_reference_values() {
        assert_eq!(phi(0.0), 0.0);
        assert!((phi(1.0) - 5.0 / 6.0).abs() < 1e-15);
        assert!((phi(2.0) - PHI_BOUND).abs() < 1e-15);
        assert!((phi(-2.0) + PHI_BOUND).abs() < 1e-15);
        // Continuity at the junction.
        assert!((phi(SQRT_2) - PHI_BOUND).abs() < 1e-15);
        assert!((phi(SQRT_2 - 1e-12) - PHI_BOUND).abs() < 1e-11);
    }

    proptest! {
        #[test]
        fn phi_odd_bounded_monotone(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            prop_assert!((phi(-x) + phi(x)).abs() < 1e-15);
            prop_assert!(phi(x).abs() <= PHI_BOUND + 1e-15);
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(phi(lo) <= phi(hi) + 1e-15);
        }
    }

    /// Independent route to E phi(a + b g): exact tail masses through the
    /// normal CDF plus composite Simpson on the inner cubic branch.
    fn expected_phi_quadrature(a: f64, b: f64) -> f64 {
        assert!(b > 0.0);
        let g1 = (-SQRT_2 - a) / b;
        let g2 = (SQRT_2 - a) / b;
        let tails = -PHI_BOUND * normal_cdf(g1) + PHI_BOUND * (1.0 - normal_cdf(g2));
        let lo = g1.max(-12.0);
        let hi = g2.min(12.0);
        if hi <= lo {
            return tails;
        }
        let pdf = |g: f64| (-0.5 * g * g).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let f = |g: f64| {
            let u = a + b * g;
            (u - u * u * u / 6.0) * pdf(g)
        };
        let steps = 20_000usize;
        let h = (hi - lo) / steps as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..steps {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
        }
        tails + acc * h / 3.0
    }

    #[test]
    fn correction_matches_quadrature_on_small_grid() {
        for a in [-3.0, -1.5, -0.2, 0.0, 0.7, 1.0, 2.4, 3.0] {
            for b in [0.05, 0.3, 1.0, 2.1, 3.0] {
                let lhs = expected_phi_quadrature(a, b);
                let rhs = a * (1.0 - b * b / 2.0) - a * a * a / 6.0
                    + correction_c(a, b).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-8,
                    "a={a} b={b}: quad {lhs} vs closed {rhs}"
                );
            }
        }
    }

    #[test]
    fn correction_special_points() {
        assert!(correction_c(0.0, 1.0).unwrap().abs() < 1e-15);
        // b -> 0+ limit vanishes inside the truncation interval.
        assert!(correction_c(1.0, 1e-8).unwrap().abs() < 1e-12);
        assert_eq!(correction_c(1.0, 0.0).unwrap(), 0.0);
        // Outside the interval the b = 0 limit is the saturated form.
        let a = 2.0;
        let expect = PHI_BOUND - a + a * a * a / 6.0;
        assert!((correction_c(a, 0.0).unwrap() - expect).abs() < 1e-15);
        assert!(correction_c(1.0, -0.1).is_err());
    }

    fn test_cfg(n: usize) -> CatoniConfig {
        CatoniConfig::new(5.0, 0.01, BetaMode::Alg4, n).unwrap()
    }

    #[test]
    fn catoni_zero_and_single_sample() {
        let cfg = test_cfg(4);
        assert_eq!(catoni_mean(&[0.0; 4], &cfg).unwrap(), 0.0);

        // Large beta: the multiplicative-noise terms fade and a single
        // inner-branch sample approaches x - x^3/(6 s^2). Pin s = 2 by
        // choosing v = 2 ln(1/delta') s^2 and push beta to ~690.
        let log_inv: f64 = 690.0;
        let delta_prime = (-log_inv).exp();
        let s_target = 2.0;
        let cfg1 =
            CatoniConfig::new(2.0 * log_inv * s_target * s_target, delta_prime, BetaMode::Alg4, 1)
                .unwrap();
        assert!((cfg1.scale() - s_target).abs() < 1e-9);
        let x = 0.75;
        let got = catoni_mean(&[x], &cfg1).unwrap();
        let expect = x - x * x * x / (6.0 * s_target * s_target);
        // Residual beta term is x^3/(2 s^2 beta) ~ 7.6e-5.
        let slack = x * x * x / (2.0 * s_target * s_target * cfg1.beta());
        assert!((got - expect).abs() <= slack + 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn catoni_estimates_pareto_mean() {
        // Shifted Pareto with alpha = 3, x_m = 2/3: mean 1, second moment 4/3,
        // infinite third moment.
        let cfg = test_cfg(10_000);
        let bound = 5.0 * (cfg.v * (1.0 / cfg.delta_prime).ln() / cfg.n as f64).sqrt();
        let mut ok = 0;
        for trial in 0..100u64 {
            let mut rng = SeededRng::new(1000 + trial);
            let samples: Vec<f64> = (0..cfg.n)
                .map(|_| {
                    let u: f64 = rng.random::<f64>().max(1e-300);
                    (2.0 / 3.0) * u.powf(-1.0 / 3.0)
                })
                .collect();
            let est = catoni_mean(&samples, &cfg).unwrap();
            if (est - 1.0).abs() <= bound {
                ok += 1;
            }
        }
        assert!(ok >= 99, "only {ok}/100 trials within {bound}");
    }

    #[test]
    fn sensitivity_formula_and_scaling() {
        let cfg1 = CatoniConfig::new(9.0, (-0.5f64).exp(), BetaMode::Alg4, 1).unwrap();
        // n=1, s=3 (v=9, 2 ln(1/delta')=1): sensitivity 3 * 4 sqrt2/3 = 4 sqrt2.
        assert!((cfg1.scale() - 3.0).abs() < 1e-12);
        assert!((catoni_sensitivity(&cfg1) - 4.0 * SQRT_2).abs() < 1e-12);

        let a = test_cfg(5_000);
        let b = test_cfg(10_000);
        let ratio = catoni_sensitivity(&b) / catoni_sensitivity(&a);
        assert!((ratio - 1.0 / SQRT_2).abs() < 1e-12);

        let c = test_cfg(10_000);
        assert!((c.scale() - 73.68).abs() < 0.01);
        assert!((catoni_sensitivity(&c) - 0.013894).abs() < 1e-5);
    }

    #[test]
    fn sensitivity_bound_holds_under_swaps() {
        let n = 64;
        let cfg = test_cfg(n);
        let limit = catoni_sensitivity(&cfg) + 1e-12;
        let mut rng = SeededRng::new(7);
        let extremes = [1e9, -1e9, 1e6, -1e6, 0.0];
        let mut worst: f64 = 0.0;
        for trial in 0..2_000 {
            let mut samples: Vec<f64> =
                (0..n).map(|_| 10.0 * (rng.random::<f64>() - 0.5)).collect();
            let base = catoni_mean(&samples, &cfg).unwrap();
            let idx = trial % n;
            let old = samples[idx];
            let new = if trial % 3 == 0 {
                extremes[trial % extremes.len()]
            } else {
                1e4 * (rng.random::<f64>() - 0.5)
            };
            samples[idx] = new;
            let swapped = catoni_mean(&samples, &cfg).unwrap();
            samples[idx] = old;
            worst = worst.max((swapped - base).abs());
        }
        assert!(worst <= limit, "worst swap {worst} > {limit}");
    }

    #[test]
    fn estimate_bounded_by_scale() {
        let cfg = test_cfg(8);
        let samples = [1e30, -1e12, 5.0, 0.0, 3.3e9, -7.7e18, 2.0, -2.0];
        let est = catoni_mean(&samples, &cfg).unwrap();
        assert!(est.abs() <= cfg.scale() * PHI_BOUND + 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn catoni_permutation_invariant(mut xs in prop::collection::vec(-1e6f64..1e6, 2..40)) {
            let cfg = test_cfg(xs.len());
            let a = catoni_mean(&xs, &cfg).unwrap();
            xs.reverse();
            let b = catoni_mean(&xs, &cfg).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn error_scaling_one_over_sqrt_n() {
        let errs = |n: usize, seed0: u64| -> f64 {
            let cfg = CatoniConfig::new(5.0, 0.01, BetaMode::Lemma5, n).unwrap();
            let mut errors: Vec<f64> = Vec::with_capacity(200);
            for t in 0..200u64 {
                let mut rng = SeededRng::new(seed0 + t);
                let samples: Vec<f64> = (0..n)
                    .map(|_| {
                        let u: f64 = rng.random::<f64>().max(1e-300);
                        (2.0 / 3.0) * u.powf(-1.0 / 3.0)
                    })
                    .collect();
                errors.push((catoni_mean(&samples, &cfg).unwrap() - 1.0).abs());
            }
            crate::numeric::median(&errors)
        };
        let coarse = errs(4_000, 500);
        let fine = errs(16_000, 900);
        assert!(
            coarse >= 1.6 * fine,
            "median error {coarse} at n=4e3 vs {fine} at n=1.6e4"
        );
    }

    #[test]
    fn private_mean_noise_calibration() {
        let cfg = test_cfg(100);
        let mut rng = SeededRng::new(314);
        let samples: Vec<f64> = (0..100).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let base = catoni_mean(&samples, &cfg).unwrap();

        let mut zero_rng = SeededRng::new(1);
        assert_eq!(
            private_mean(&samples, &cfg, 0.0, &mut zero_rng).unwrap(),
            base
        );
        assert!(private_mean(&samples, &cfg, -1.0, &mut zero_rng).is_err());

        let mut a = SeededRng::new(77);
        let mut b = SeededRng::new(77);
        assert_eq!(
            private_mean(&samples, &cfg, 0.5, &mut a).unwrap().to_bits(),
            private_mean(&samples, &cfg, 0.5, &mut b).unwrap().to_bits()
        );

        let sigma = 0.7;
        let runs = 10_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for seed in 0..runs {
            let mut r = SeededRng::new(40_000 + seed);
            let d = private_mean(&samples, &cfg, sigma, &mut r).unwrap() - base;
            sum += d;
            sumsq += d * d;
        }
        let m = sum / runs as f64;
        let sd = (sumsq / runs as f64 - m * m).sqrt();
        assert!(
            (sd - sigma).abs() < 0.05 * sigma,
            "empirical sd {sd} vs sigma {sigma}"
        );
    }
}
