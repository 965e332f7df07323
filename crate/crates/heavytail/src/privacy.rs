//! Privacy-budget algebra.
//!
//! Everything here is pure arithmetic: zCDP to (eps, delta) conversion, the
//! per-optimizer derived budgets, per-query splits, and the Gaussian noise
//! scale of the known-variance optimizer. There is no runtime ledger; the
//! optimizers compute their allocation once at startup and the round-trip
//! identities below pin the algebra exactly.

use crate::error::{Error, Result};

/// Target (eps, delta) plus the query-shape parameters the split depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    pub eps: f64,
    pub delta: f64,
    /// Dimension: one mean query per coordinate per iteration.
    pub d: usize,
    /// Iteration count.
    pub t: usize,
}

impl PrivacyBudget {
    pub fn new(eps: f64, delta: f64, d: usize, t: usize) -> Result<Self> {
        let b = Self { eps, delta, d, t };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::config(format!(
                "eps must lie in (0, 1], got {}",
                self.eps
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.d == 0 || self.t == 0 {
            return Err(Error::config("d and T must be positive"));
        }
        Ok(())
    }
}

/// (eps, delta)-DP level implied by rho-zCDP: `rho + 2 sqrt(rho ln(1/delta))`.
pub fn zcdp_to_dp(rho: f64, delta: f64) -> Result<f64> {
    if rho < 0.0 {
        return Err(Error::domain(format!("rho must be >= 0, got {rho}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok(rho + 2.0 * (rho * (1.0 / delta).ln()).sqrt())
}

/// Known-mean optimizer budget: `sqrt(2L + 2 eps) - sqrt(2L)`, `L = ln(1/delta)`.
///
/// Computed in the cancellation-free form `2 eps / (sqrt(2L + 2 eps) + sqrt(2L))`.
pub fn eps_tilde_known_mean(eps: f64, delta: f64) -> f64 {
    let l = (1.0 / delta).ln();
    2.0 * eps / ((2.0 * l + 2.0 * eps).sqrt() + (2.0 * l).sqrt())
}

/// Known-variance optimizer budget: `(sqrt(L + eps) - sqrt(L))^2`.
pub fn eps_tilde_known_variance(eps: f64, delta: f64) -> f64 {
    let l = (1.0 / delta).ln();
    let root = eps / ((l + eps).sqrt() + l.sqrt());
    root * root
}

/// Gaussian noise scale for the known-variance optimizer:
/// `sigma^2 = 8 v d T / (9 ln(1/delta') n eps_tilde)`; returns `sigma`.
pub fn gaussian_sigma_known_variance(
    v: f64,
    d: usize,
    t: usize,
    delta_prime: f64,
    n: usize,
    eps_tilde: f64,
) -> Result<f64> {
    if !(v > 0.0) || d == 0 || t == 0 || n == 0 || !(eps_tilde > 0.0) {
        return Err(Error::domain(
            "gaussian sigma requires positive v, d, T, n, eps_tilde".to_string(),
        ));
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::domain(format!(
            "delta' must lie in (0,1), got {delta_prime}"
        )));
    }
    let sigma_sq = 8.0 * v * (d as f64) * (t as f64)
        / (9.0 * (1.0 / delta_prime).ln() * n as f64 * eps_tilde);
    Ok(sigma_sq.sqrt())
}

/// Per-coordinate, per-iteration mechanism scale for the known-mean
/// optimizer: `eps_tilde / sqrt(dT)`. Over `dT` queries the zCDP total is
/// `dT * (eps_tilde/sqrt(dT))^2 / 2 = eps_tilde^2 / 2`.
pub fn per_query_eps_known_mean(eps_tilde: f64, d: usize, t: usize) -> f64 {
    eps_tilde / ((d * t) as f64).sqrt()
}
