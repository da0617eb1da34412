//! Limit objects of the two fluctuation regimes.
//!
//! Bounded regime: the centered statistic converges to the infinitely
//! divisible law μ_{f,θ} with characteristic function
//! `exp(θ ∫ (e^{itx} - 1 - itx) dM_f)`, where the Lévy measure
//! `M_f = Σ_j (1/j)·δ_{u_j}` collects the atoms `u_j = j·R_j`. μ is also the
//! law of `Σ_j u_j (W_j - θ/j)` for independent `W_j ~ Poisson(θ/j)`.
//!
//! Divergent regime: the Poissonized statistic `H_N = Σ_{j≤N} u_j W_j`,
//! centered and divided by `η_N = √(θ Σ_{j≤N} j R_j²)`, converges to N(0,1).

use crate::rng::ReplicateRng;
use crate::trapezoid::{ErrorSeries, Regime};
use crate::{Error, KahanSum, Result};
use crate::funcs::Family;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

/// One atom of the Lévy measure: mass `1/j` at location `u_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyAtom {
    pub j: usize,
    pub location: f64,
    pub mass: f64,
}

/// Truncated Lévy measure of μ_{f,θ}.
#[derive(Debug, Clone, Serialize)]
pub struct LimitLawSpec {
    pub theta: f64,
    /// Atoms `(u_j, 1/j)` for `u_j ≠ 0`, `j ≤ j_trunc`.
    pub atoms: Vec<LevyAtom>,
    /// Bound on `θ·Σ_{j>j_trunc} u_j²/j` (exactly 0 for trig polynomials).
    pub tail_variance_bound: f64,
}

impl LimitLawSpec {
    /// Variance of the truncated law: `θ·Σ_atoms u² · mass`.
    pub fn variance(&self) -> f64 {
        let mut acc = KahanSum::new();
        for a in &self.atoms {
            acc.add(a.location * a.location * a.mass);
        }
        self.theta * acc.value()
    }
}

/// Characteristic-function value with its truncation metadata.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CfValue {
    pub re: f64,
    pub im: f64,
    /// The discarded exponent mass is at most `t²/2 · tail_variance_bound`.
    pub exponent_tail_bound: f64,
}

impl CfValue {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Gaussian-regime normalization `η_N² = θ·Σ_{j≤N} j·R_j²`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaNormalization {
    pub n: usize,
    pub eta_sq: f64,
}

impl EtaNormalization {
    pub fn eta(&self) -> f64 {
        self.eta_sq.sqrt()
    }
}

/// Build the truncated Lévy measure from an error series.
///
/// Requires the Bounded regime: indicators (log-divergent) are rejected with
/// `WrongRegime`, identically-zero series with `DegenerateLaw`.
pub fn build_levy(series: &ErrorSeries, theta: f64, j_trunc: usize) -> Result<LimitLawSpec> {
    assert!(j_trunc >= 1 && j_trunc <= series.jmax, "j_trunc must be within the built series");
    if series.all_zero() {
        return Err(Error::DegenerateLaw);
    }
    if series.family == Family::Indicator {
        return Err(Error::WrongRegime { op: "build_levy", found: Regime::Divergent });
    }
    let mut atoms = Vec::new();
    for j in 1..=j_trunc {
        let u = series.u(j);
        if u != 0.0 {
            atoms.push(LevyAtom { j, location: u, mass: 1.0 / j as f64 });
        }
    }
    if atoms.is_empty() {
        return Err(Error::DegenerateLaw);
    }

    // tail of θ·Σ u²/j beyond j_trunc: exact within the built series, plus a
    // family continuation beyond jmax
    let mut tail = KahanSum::new();
    for j in (j_trunc + 1)..=series.jmax {
        let u = series.u(j);
        if u != 0.0 {
            tail.add(u * u / j as f64);
        }
    }
    let mut bound = theta * tail.value();
    if series.family == Family::SmoothPlateau {
        // superpolynomial decay: the last built octave dominates its own
        // continuation; double it as a conservative allowance
        let mut last_octave = KahanSum::new();
        for j in (series.jmax / 2).max(j_trunc)..=series.jmax {
            let u = series.u(j);
            last_octave.add(u * u / j as f64);
        }
        bound += 2.0 * theta * last_octave.value();
    }
    Ok(LimitLawSpec { theta, atoms, tail_variance_bound: bound })
}

/// `μ̂_{f,θ}(t) = exp(θ·Σ_atoms (1/j)(e^{itu_j} - 1 - itu_j))`.
pub fn cf_mu(law: &LimitLawSpec, t: f64) -> CfValue {
    let mut expo = Complex64::new(0.0, 0.0);
    for a in &law.atoms {
        let itu = t * a.location;
        let e = Complex64::new(itu.cos() - 1.0, itu.sin() - itu);
        expo += a.mass * e;
    }
    let v = (law.theta * expo).exp();
    CfValue { re: v.re, im: v.im, exponent_tail_bound: 0.5 * t * t * law.tail_variance_bound }
}

/// One draw of `Σ u_j (W_j - θ/j)`, `W_j` independent Poisson(θ/j).
///
/// Fails with `CannotMeetTolerance` when the truncated tail variance exceeds
/// `eps²` (the discarded L² mass must be below the requested tolerance).
pub fn sample_mu(law: &LimitLawSpec, eps: f64, rng: &mut ReplicateRng) -> Result<f64> {
    assert!(eps > 0.0);
    if law.tail_variance_bound >= eps * eps {
        return Err(Error::CannotMeetTolerance { eps, tail: law.tail_variance_bound });
    }
    let mut v = 0.0f64;
    for a in &law.atoms {
        let lambda = law.theta * a.mass;
        let w = Poisson::new(lambda).expect("positive rate").sample(rng);
        v += a.location * (w - lambda);
    }
    Ok(v)
}

/// Reusable sampler for the Poissonized statistic `H_N - E[H_N]`.
///
/// Sparse mode draws the total event count `K ~ Poisson(θ·Σ 1/j)` and then K
/// positions with probability ∝ 1/j, making one draw O(θ·log N) instead of
/// O(N).
pub struct HnSampler<'a> {
    series: &'a ErrorSeries,
    pub theta: f64,
    pub n: usize,
    /// cumulative 1/j weights for position sampling
    cum: Vec<f64>,
    /// θ·Σ_{j≤n} 1/j
    lambda_total: f64,
    /// E[H_N] = θ·Σ_{j≤n} R_j
    pub mean: f64,
}

impl<'a> HnSampler<'a> {
    pub fn new(series: &'a ErrorSeries, theta: f64, n: usize) -> Result<Self> {
        if series.jmax < n {
            return Err(Error::SeriesTooShort { jmax: series.jmax, n });
        }
        let mut cum = Vec::with_capacity(n);
        let mut acc = KahanSum::new();
        for j in 1..=n {
            acc.add(1.0 / j as f64);
            cum.push(acc.value());
        }
        let lambda_total = theta * acc.value();
        let mean = theta * series.sum_r(n);
        Ok(Self { series, theta, n, cum, lambda_total, mean })
    }

    /// Sparse draw of `H_N - E[H_N]`.
    pub fn draw_sparse(&self, rng: &mut ReplicateRng) -> f64 {
        let k = Poisson::new(self.lambda_total).expect("positive rate").sample(rng) as u64;
        let total = self.cum[self.n - 1];
        let mut v = 0.0f64;
        for _ in 0..k {
            let x: f64 = rng.random::<f64>() * total;
            let idx = self.cum.partition_point(|&c| c < x);
            let j = (idx + 1).min(self.n);
            v += self.series.u(j);
        }
        v - self.mean
    }

    /// Dense draw: one Poisson(θ/j) per j with `u_j ≠ 0`.
    pub fn draw_dense(&self, rng: &mut ReplicateRng) -> f64 {
        let mut v = 0.0f64;
        for j in 1..=self.n {
            let u = self.series.u(j);
            if u == 0.0 {
                continue;
            }
            let lambda = self.theta / j as f64;
            let w = Poisson::new(lambda).expect("positive rate").sample(rng);
            v += u * (w - lambda);
        }
        v
    }
}

/// One draw of `H_N - E[H_N]`.
pub fn sample_h_n(
    series: &ErrorSeries,
    theta: f64,
    n: usize,
    rng: &mut ReplicateRng,
    sparse: bool,
) -> Result<f64> {
    let sampler = HnSampler::new(series, theta, n)?;
    Ok(if sparse { sampler.draw_sparse(rng) } else { sampler.draw_dense(rng) })
}

/// `η_N² = θ·Σ_{j≤N} j·R_j²` from the series partial sums.
pub fn eta_normalization(series: &ErrorSeries, theta: f64, n: usize) -> Result<EtaNormalization> {
    if series.jmax < n {
        return Err(Error::SeriesTooShort { jmax: series.jmax, n });
    }
    Ok(EtaNormalization { n, eta_sq: theta * series.partial_sum_jrj2_at(n) })
}

/// `ε_N = max_{j≤N}|u_j| / η_N` — the Gaussian-regime hypothesis holds along
/// N when this tends to zero.
pub fn max_u_over_eta(series: &ErrorSeries, theta: f64, n: usize) -> Result<f64> {
    let eta = eta_normalization(series, theta, n)?;
    if eta.eta_sq == 0.0 {
        return Err(Error::DegenerateLaw);
    }
    Ok(series.max_abs_u(n) / eta.eta())
}
