//! Heavy-tailed noise samplers and mechanism noise primitives.
//!
//! Both samplers are inverse-transform/exponential maps of standard draws, so
//! a fixed seed reproduces the stream exactly. Centering uses the closed-form
//! means (lognormal `exp(mu + sigma^2/2)`, log-logistic
//! `exp(mu) * pi*sigma / sin(pi*sigma)`), giving exactly zero-mean noise.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric::logit;
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Lognormal,
    Loglogistic,
}

/// Location/scale description of a heavy-tailed noise distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub mu: f64,
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        let spec = Self {
            kind: NoiseKind::Lognormal,
            mu,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn loglogistic(mu: f64, sigma: f64) -> Result<Self> {
        let spec = Self {
            kind: NoiseKind::Loglogistic,
            mu,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::config(format!(
                "noise scale must be positive, got {}",
                self.sigma
            )));
        }
        if self.kind == NoiseKind::Loglogistic && self.sigma >= 1.0 {
            return Err(Error::config(format!(
                "log-logistic scale must be < 1 for the mean to exist, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Closed-form mean of the raw (uncentered) distribution.
    pub fn mean(&self) -> f64 {
        match self.kind {
            NoiseKind::Lognormal => (self.mu + 0.5 * self.sigma * self.sigma).exp(),
            NoiseKind::Loglogistic => {
                let ps = std::f64::consts::PI * self.sigma;
                self.mu.exp() * ps / ps.sin()
            }
        }
    }
}

/// Draw `exp(mu + sigma * g)` with `g` standard Gaussian.
pub fn sample_lognormal(spec: &NoiseSpec, rng: &mut SeededRng) -> Result<f64> {
    spec.validate()?;
    if spec.kind != NoiseKind::Lognormal {
        return Err(Error::config("sample_lognormal called with non-lognormal spec"));
    }
    let g: f64 = rng.sample(StandardNormal);
    Ok((spec.mu + spec.sigma * g).exp())
}

/// Draw `exp(mu + sigma * logit(U))` with `U` uniform on (0, 1), inverting
/// the log-logistic CDF.
pub fn sample_loglogistic(spec: &NoiseSpec, rng: &mut SeededRng) -> Result<f64> {
    spec.validate()?;
    if spec.kind != NoiseKind::Loglogistic {
        return Err(Error::config(
            "sample_loglogistic called with non-log-logistic spec",
        ));
    }
    // Open interval: shift away from 0 and 1 so logit stays finite.
    let u: f64 = loop {
        let u = rng.random::<f64>();
        if u > 0.0 && u < 1.0 {
            break u;
        }
    };
    Ok((spec.mu + spec.sigma * logit(u)).exp())
}

/// Draw from `spec` and subtract its closed-form mean.
pub fn centered_noise(spec: &NoiseSpec, rng: &mut SeededRng) -> Result<f64> {
    let raw = match spec.kind {
        NoiseKind::Lognormal => sample_lognormal(spec, rng)?,
        NoiseKind::Loglogistic => sample_loglogistic(spec, rng)?,
    };
    Ok(raw - spec.mean())
}

/// `sinh(Y)` for `Y` standard Gaussian; the arsinh-normal mechanism noise.
pub fn sinh_gaussian(rng: &mut SeededRng) -> f64 {
    let y: f64 = rng.sample(StandardNormal);
    y.sinh()
}
