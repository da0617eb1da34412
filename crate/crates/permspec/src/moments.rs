//! Exact finite-N moments of the linear statistic under Ewens(θ).
//!
//! Everything here reduces to the falling-factorial moment formula for cycle
//! counts,
//!
//! ```text
//! E[Π_j α_j^[r_j]] = 1_{m≤N} · Ψ_N(m) · Π_j (θ/j)^{r_j},   m = Σ j·r_j,
//! ```
//!
//! with `Ψ_N(j) = Π_{k=0}^{j-1} (N-k)/(θ+N-k-1)`. `Ψ_N` is also the law of
//! the backward spacing `J_N` of the Feller coupling (`P[J_N=j] =
//! (θ/N)Ψ_N(j)`), which identifies Cesàro means of order θ with
//! `J_N`-weighted sums.

use crate::funcs::FunctionSpec;
use crate::trapezoid::ErrorSeries;
use crate::{Error, KahanSum, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Practical ceiling for the O(N²) double-sum variance route.
pub const VARIANCE_DIRECT_CEILING: usize = 20_000;

/// Table of `Ψ_N(1)..Ψ_N(N)` for one `(N, θ)`.
#[derive(Debug, Clone, Serialize)]
pub struct PsiTable {
    pub n: usize,
    pub theta: f64,
    values: Vec<f64>,
}

impl PsiTable {
    pub fn new(n: usize, theta: f64) -> Self {
        assert!(n >= 1 && theta > 0.0);
        let nf = n as f64;
        let mut values = Vec::with_capacity(n);
        let mut acc = 1.0f64;
        for j in 1..=n {
            // Ψ(j) = Ψ(j-1) · (N-j+1)/(θ+N-j)
            acc *= (nf - (j - 1) as f64) / (theta + nf - j as f64);
            values.push(acc);
        }
        Self { n, theta, values }
    }

    /// `Ψ_N(j)`, 1-indexed; `Ψ_N(0) = 1` by convention.
    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else {
            self.values[j - 1]
        }
    }

    /// `(θ/N)·Σ_j Ψ_N(j)`; equals 1 exactly (the law of J_N).
    pub fn normalization(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        self.theta / self.n as f64 * acc.value()
    }

    /// `P[J_N = j] = (θ/N)·Ψ_N(j)`.
    #[inline]
    pub fn jn_pmf(&self, j: usize) -> f64 {
        self.theta / self.n as f64 * self.get(j)
    }
}

/// `Ψ_N(j)` as a single product (no factorials).
pub fn psi(n: usize, theta: f64, j: usize) -> Result<f64> {
    if j < 1 || j > n {
        return Err(Error::OutOfRange { j, n });
    }
    let nf = n as f64;
    let mut acc = 1.0f64;
    for k in 0..j {
        acc *= (nf - k as f64) / (theta + nf - k as f64 - 1.0);
    }
    Ok(acc)
}

/// Watterson falling-factorial moment `E[Π α_j^[r_j]]`.
///
/// `pairs` lists `(j, r_j)` with distinct `j`; returns 0 when `Σ j·r_j > n`.
pub fn falling_factorial_moment(n: usize, theta: f64, pairs: &[(usize, u32)]) -> f64 {
    debug_assert!(
        {
            let mut seen = std::collections::BTreeSet::new();
            pairs.iter().all(|(j, _)| seen.insert(*j))
        },
        "cycle lengths must be distinct"
    );
    let m: usize = pairs.iter().map(|(j, r)| j * *r as usize).sum();
    if m > n {
        return 0.0;
    }
    let mut v = if m == 0 { 1.0 } else { psi(n, theta, m).expect("m <= n") };
    for (j, r) in pairs {
        v *= (theta / *j as f64).powi(*r as i32);
    }
    v
}

/// Exact mean `E[I] = N∫f + θ·Σ_{j≤N} Ψ_N(j)·R_j`.
pub fn exact_mean(n: usize, theta: f64, series: &ErrorSeries, f: &FunctionSpec) -> Result<f64> {
    if series.jmax < n {
        return Err(Error::SeriesTooShort { jmax: series.jmax, n });
    }
    let psi = PsiTable::new(n, theta);
    let mut acc = KahanSum::new();
    for j in 1..=n {
        acc.add(psi.get(j) * series.r(j));
    }
    Ok(n as f64 * f.integral() + theta * acc.value())
}

/// Exact variance of the linear statistic:
///
/// ```text
/// Var[I] = θ Σ_j jR_j²Ψ_N(j)
///        + θ² Σ_{j,j'≤N} R_j R_{j'} (Ψ_N(j+j')·1_{j+j'≤N} - Ψ_N(j)Ψ_N(j'))
/// ```
///
/// (the double sum includes the diagonal). Dispatches between the direct
/// O(N²) route (N ≤ [`VARIANCE_DIRECT_CEILING`]), a θ=1 prefix-sum fast path,
/// and an FFT convolution route for large N.
pub fn exact_variance(n: usize, theta: f64, series: &ErrorSeries) -> Result<f64> {
    if series.jmax < n {
        return Err(Error::SeriesTooShort { jmax: series.jmax, n });
    }
    if theta == 1.0 {
        Ok(exact_variance_theta1(n, series))
    } else if n <= VARIANCE_DIRECT_CEILING {
        Ok(exact_variance_direct(n, theta, series))
    } else {
        Ok(exact_variance_fft(n, theta, series))
    }
}

/// Direct O(N²) evaluation of the variance formula.
pub fn exact_variance_direct(n: usize, theta: f64, series: &ErrorSeries) -> f64 {
    let psi = PsiTable::new(n, theta);
    let r = &series.r[..n];

    let mut diag = KahanSum::new();
    for (idx, &rj) in r.iter().enumerate() {
        if rj != 0.0 {
            let j = idx + 1;
            diag.add(j as f64 * rj * rj * psi.get(j));
        }
    }

    let mut cross = KahanSum::new();
    for (i, &ri) in r.iter().enumerate() {
        if ri == 0.0 {
            continue;
        }
        let j = i + 1;
        let pj = psi.get(j);
        for (i2, &ri2) in r.iter().enumerate() {
            if ri2 == 0.0 {
                continue;
            }
            let j2 = i2 + 1;
            let coupling = if j + j2 <= n { psi.get(j + j2) } else { 0.0 };
            cross.add(ri * ri2 * (coupling - pj * psi.get(j2)));
        }
    }

    theta * diag.value() + theta * theta * cross.value()
}

/// θ=1 fast path: `Ψ ≡ 1`, so the formula collapses to
/// `Σ jR_j² - Σ_{j+j'>N} R_j R_{j'}` computed with suffix sums in O(N).
pub fn exact_variance_theta1(n: usize, series: &ErrorSeries) -> f64 {
    let r = &series.r[..n];
    // suffix[k] = Σ_{j' > k} R_{j'} for k = 0..n
    let mut suffix = vec![0.0f64; n + 1];
    let mut acc = KahanSum::new();
    for k in (0..n).rev() {
        acc.add(r[k]);
        suffix[k] = acc.value();
    }
    let mut corr = KahanSum::new();
    for (i, &ri) in r.iter().enumerate() {
        if ri == 0.0 {
            continue;
        }
        let j = i + 1;
        // j' ranges over (n-j, n]: suffix index n-j
        corr.add(ri * suffix[n - j]);
    }
    series.partial_sum_jrj2_at(n) - corr.value()
}

/// FFT route: the coupling term `Σ_{j+j'≤N} R_jR_{j'}Ψ(j+j')` is a weighted
/// self-convolution of R, O(N log N).
pub fn exact_variance_fft(n: usize, theta: f64, series: &ErrorSeries) -> f64 {
    let psi = PsiTable::new(n, theta);
    let r = &series.r[..n];

    let mut diag = KahanSum::new();
    let mut psi_weighted = KahanSum::new();
    for (idx, &rj) in r.iter().enumerate() {
        let j = idx + 1;
        if rj != 0.0 {
            diag.add(j as f64 * rj * rj * psi.get(j));
            psi_weighted.add(rj * psi.get(j));
        }
    }

    // self-convolution c_m = Σ_{j+j'=m} R_j R_{j'} via FFT
    let len = (2 * n + 1).next_power_of_two();
    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); len];
    for (idx, &rj) in r.iter().enumerate() {
        buf[idx + 1] = Complex64::new(rj, 0.0);
    }
    fft.process(&mut buf);
    for v in buf.iter_mut() {
        *v = *v * *v;
    }
    ifft.process(&mut buf);
    let scale = 1.0 / len as f64;

    let mut cross = KahanSum::new();
    for m in 2..=n {
        cross.add(buf[m].re * scale * psi.get(m));
    }

    let pw = psi_weighted.value();
    theta * diag.value() + theta * theta * (cross.value() - pw * pw)
}

/// Cesàro number `A_n^α = binom(n+α, n)` via the multiplicative recurrence
/// `A_n = A_{n-1}·(n+α)/n` (exact for integer orders, stable for fractional).
pub fn cesaro_number(alpha: f64, n: usize) -> f64 {
    assert!(alpha > -1.0, "Cesàro numbers need alpha > -1");
    let mut a = 1.0f64;
    for k in 1..=n {
        a *= (k as f64 + alpha) / k as f64;
    }
    a
}

/// Cesàro mean of order θ: `σ_n^θ(s) = Σ_{j=0}^n (A^{θ-1}_{n-j}/A^θ_n)·s_j`.
pub fn cesaro_mean(s: &[f64], order: f64, n: usize) -> f64 {
    assert!(order > 0.0);
    assert!(s.len() >= n + 1, "sequence must provide s_0..s_n");
    // ascending table of A^{θ-1}_k
    let mut a = Vec::with_capacity(n + 1);
    let mut acc = 1.0f64;
    a.push(acc);
    for k in 1..=n {
        acc *= (k as f64 + order - 1.0) / k as f64;
        a.push(acc);
    }
    let an = cesaro_number(order, n);
    let mut sum = KahanSum::new();
    for j in 0..=n {
        sum.add(a[n - j] / an * s[j]);
    }
    sum.value()
}

/// Which coupling bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CouplingBoundKind {
    L1,
    L2,
}

/// Structural right-hand-side components of the coupling bounds, with the
/// existential constant C(θ) left as a reported free scale.
#[derive(Debug, Clone, Serialize)]
pub enum CouplingBoundRhs {
    /// `( (1/N)Σ|u_j|, (θ/N)Σ|u_j|Ψ_N(j) )`.
    L1 { mean_abs_u: f64, psi_weighted_abs_u: f64 },
    /// The four Cesàro-mean combinations
    /// `( σ¹(|u|)², σ¹(u²), σ¹(|u|)·σ^θ(|u|), σ^θ(u²) )`.
    L2 {
        sigma1_abs_sq: f64,
        sigma1_usq: f64,
        sigma1_abs_sigma_theta_abs: f64,
        sigma_theta_usq: f64,
    },
}

impl CouplingBoundRhs {
    pub fn components(&self) -> Vec<f64> {
        match self {
            Self::L1 { mean_abs_u, psi_weighted_abs_u } => vec![*mean_abs_u, *psi_weighted_abs_u],
            Self::L2 { sigma1_abs_sq, sigma1_usq, sigma1_abs_sigma_theta_abs, sigma_theta_usq } => {
                vec![*sigma1_abs_sq, *sigma1_usq, *sigma1_abs_sigma_theta_abs, *sigma_theta_usq]
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.components().iter().sum()
    }
}

/// Evaluate the structural parts of the L¹/L² coupling bounds for a weight
/// sequence `u_1..u_n`.
pub fn coupling_bound_rhs(n: usize, theta: f64, u: &[f64], which: CouplingBoundKind) -> CouplingBoundRhs {
    assert_eq!(u.len(), n, "u must have length n");
    match which {
        CouplingBoundKind::L1 => {
            let psi = PsiTable::new(n, theta);
            let mut sum_abs = KahanSum::new();
            let mut sum_psi = KahanSum::new();
            for (idx, &uj) in u.iter().enumerate() {
                sum_abs.add(uj.abs());
                sum_psi.add(uj.abs() * psi.get(idx + 1));
            }
            CouplingBoundRhs::L1 {
                mean_abs_u: sum_abs.value() / n as f64,
                psi_weighted_abs_u: theta / n as f64 * sum_psi.value(),
            }
        }
        CouplingBoundKind::L2 => {
            // sequences with s_0 = 0, matching the J_N identification
            let mut abs_u = Vec::with_capacity(n + 1);
            let mut usq = Vec::with_capacity(n + 1);
            abs_u.push(0.0);
            usq.push(0.0);
            for &uj in u {
                abs_u.push(uj.abs());
                usq.push(uj * uj);
            }
            let s1_abs = cesaro_mean(&abs_u, 1.0, n);
            let s1_usq = cesaro_mean(&usq, 1.0, n);
            let st_abs = cesaro_mean(&abs_u, theta, n);
            let st_usq = cesaro_mean(&usq, theta, n);
            CouplingBoundRhs::L2 {
                sigma1_abs_sq: s1_abs * s1_abs,
                sigma1_usq: s1_usq,
                sigma1_abs_sigma_theta_abs: s1_abs * st_abs,
                sigma_theta_usq: st_usq,
            }
        }
    }
}
