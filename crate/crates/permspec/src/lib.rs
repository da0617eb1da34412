#![forbid(unsafe_code)]
//! Spectral linear statistics of random permutation matrices under the
//! Ewens(θ) distribution.
//!
//! The spectrum of a permutation matrix is determined by the cycle counts
//! (α_1, …, α_N) of the permutation: every cycle of length j contributes the
//! j-th roots of unity. For a 1-periodic observable f the linear statistic
//! therefore satisfies
//!
//! ```text
//! I_{σ,N}(f) = N ∫₀¹ f + Σ_j α_j · j·R_j(f),
//! ```
//!
//! where `R_j(f)` is the error of the j-point composite trapezoidal rule.
//! This crate provides
//!
//! * [`funcs`] — closed-form periodic test functions with exact evaluation,
//! * [`trapezoid`] — the error sequence `R_j`, `u_j = j·R_j`, and regime
//!   classification (bounded vs. log-divergent variance),
//! * [`ewens`] — Feller-coupling samplers for Ewens cycle counts and the
//!   exact cycle-type pmf,
//! * [`moments`] — exact finite-N mean/variance, Ψ_N tables, Watterson
//!   moments, and Cesàro means,
//! * [`limitlaw`] — the infinitely divisible limit law (Lévy atoms,
//!   characteristic function, sampler) and the Gaussian-regime
//!   normalization η_N,
//! * [`montecarlo`] — a deterministic, parallel replication harness with
//!   empirical-law summaries and coupling experiments.

pub mod error;
pub mod ewens;
pub mod funcs;
pub mod limitlaw;
pub mod moments;
pub mod montecarlo;
pub mod rng;
pub mod trapezoid;

pub use error::Error;
pub use funcs::FunctionSpec;
pub use trapezoid::{ErrorSeries, Method, Regime};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Compensated (Kahan) summation.
///
/// The series builders sum up to 10^6 terms that cancel to near zero; plain
/// accumulation loses the low bits that the 1e-12 agreement suites check.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Fractional part `{x} = x - floor(x)` with a snap-to-integer tolerance.
///
/// `j·a` for rational `a` must land on exact integers even when `a` itself is
/// not exactly representable (e.g. `10 · 0.1`), so values within `1e-12` of an
/// integer are treated as that integer before flooring.
#[inline]
pub fn frac_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 {
        0.0
    } else {
        x - x.floor()
    }
}
