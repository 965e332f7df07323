//! Differentially private stochastic convex optimization for heavy-tailed data.
//!
//! The crate provides seedable heavy-tailed noise samplers, a soft-truncation
//! (Catoni-style) robust mean estimator with a Gaussian-mechanism private
//! variant, a trimmed-mean mechanism with smooth-sensitivity arsinh-normal
//! noise, zCDP-based privacy accounting, two private projected-gradient
//! optimizers plus their non-private baseline, a sample-and-aggregate
//! meta-algorithm, and synthetic/real dataset utilities.
//!
//! Inner loops are data-parallel via rayon when the `parallel` feature is
//! enabled (the default); disabling it yields a sequential build that produces
//! bit-identical results.

pub mod aggregate;
pub mod data;
pub mod distributions;
pub mod error;
pub mod exec;
pub mod losses;
pub mod numeric;
pub mod optimizers;
pub mod privacy;
pub mod rng;
pub mod robust_mean;
pub mod trimmed;

pub use error::{Error, Result};
pub use rng::SeededRng;
