//! Ewens cycle counts via the Feller coupling.
//!
//! The coupling draws independent Bernoulli bits `ξ_i` with
//! `P[ξ_i = 1] = θ/(θ+i-1)` (and `ξ_1 ≡ 1`). The spacings between successive
//! ones in `1 ξ_2 … ξ_N 1` have exactly the Ewens(θ) cycle-count law
//! `(α_1,…,α_N)`, while the spacings of the un-terminated infinite sequence
//! define independent Poisson(θ/j) counts `W_j` on the same probability
//! space, with the pointwise bound
//!
//! ```text
//! |C_j(N) - W_j| ≤ W_{jN} + 1{J_N+K_N = j+1} + 1{J_N = j}.
//! ```

use crate::rng::{ReplicateRng, XiTable};
use crate::trapezoid::ErrorSeries;
use crate::{Error, KahanSum, Result};
use serde::Serialize;

/// Ewens concentration parameter θ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EwensParam(f64);

impl EwensParam {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta.is_finite() {
            Ok(Self(theta))
        } else {
            Err(Error::InvalidConfig(format!("theta must be positive and finite, got {theta}")))
        }
    }

    #[inline]
    pub fn theta(self) -> f64 {
        self.0
    }
}

/// Cycle counts `(α_1,…,α_N)` with `Σ j·α_j = N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleCounts {
    pub n: usize,
    /// `alpha[j-1] = α_j`.
    pub alpha: Vec<u64>,
}

impl CycleCounts {
    pub fn new(n: usize, alpha: Vec<u64>) -> Result<Self> {
        let got: u64 = alpha.iter().enumerate().map(|(i, a)| (i as u64 + 1) * a).sum();
        if got != n as u64 || alpha.len() != n {
            return Err(Error::InvalidCycleType { got, expected: n as u64 });
        }
        Ok(Self { n, alpha })
    }

    /// Total number of cycles `K(σ) = Σ α_j`.
    pub fn total_cycles(&self) -> u64 {
        self.alpha.iter().sum()
    }
}

/// Stream the spacing lengths of `1 ξ_2 … ξ_n 1` (the cycle lengths of one
/// Ewens draw) into `visit`, consuming exactly `n-1` uniform draws.
#[inline]
pub fn for_each_cycle_length(
    table: &XiTable,
    n: usize,
    rng: &mut ReplicateRng,
    mut visit: impl FnMut(usize),
) {
    debug_assert!(table.len() >= n);
    let mut last = 1usize;
    for i in 2..=n {
        if table.draw(rng, i as u64) {
            visit(i - last);
            last = i;
        }
    }
    visit(n + 1 - last);
}

/// One Ewens(θ) cycle-count sample (dense `α` vector).
pub fn sample_cycle_counts(n: usize, theta: EwensParam, rng: &mut ReplicateRng) -> CycleCounts {
    assert!(n >= 1);
    let table = XiTable::new(theta.theta(), n);
    sample_cycle_counts_with_table(&table, n, rng)
}

/// As [`sample_cycle_counts`] with a shared threshold table.
pub fn sample_cycle_counts_with_table(
    table: &XiTable,
    n: usize,
    rng: &mut ReplicateRng,
) -> CycleCounts {
    let mut alpha = vec![0u64; n];
    for_each_cycle_length(table, n, rng, |len| alpha[len - 1] += 1);
    CycleCounts { n, alpha }
}

/// Sparse cycle lengths of one draw, appended to `out` (unsorted).
pub fn sample_cycle_lengths_with_table(
    table: &XiTable,
    n: usize,
    rng: &mut ReplicateRng,
    out: &mut Vec<usize>,
) {
    out.clear();
    for_each_cycle_length(table, n, rng, |len| out.push(len));
}

/// A joint realization of the Feller construction.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingRealization {
    pub n: usize,
    pub horizon: usize,
    /// `xi[i]` for `i = 1..=horizon` (index 0 unused, `xi[1] ≡ true`).
    pub xi: Vec<bool>,
    /// `c[j-1] = C_j(N)`: spacing counts of `1 ξ_2 … ξ_N 1`.
    pub c: Vec<u32>,
    /// `w[j-1] = W_j` truncated at the horizon (events with both endpoints
    /// inside the observed window).
    pub w: Vec<u32>,
    /// `w_after_n[j-1] = W_{jN}`: events starting after position N
    /// (truncated at the horizon, consistently with `w`).
    pub w_after_n: Vec<u32>,
    /// Backward spacing `J_N = min{j : ξ_{N-j+1} = 1}`.
    pub j_n: usize,
    /// Forward spacing `K_N = min{j : ξ_{N+j} = 1}`; `None` when no one
    /// occurs inside the horizon (then `K_N > horizon - n ≥ n`, so the
    /// coupling indicators vanish for every `j ≤ n`).
    pub k_n: Option<usize>,
    /// Expected mass of each `W_j` beyond the horizon: `θ²/(horizon - n)`.
    pub w_tail_bound: f64,
}

impl CouplingRealization {
    /// `Σ j·C_j(N) = N`.
    pub fn c_mass(&self) -> u64 {
        self.c.iter().enumerate().map(|(i, &c)| (i as u64 + 1) * c as u64).sum()
    }

    /// Verify the pointwise coupling inequality for every `j ≤ n`.
    pub fn coupling_inequality_holds(&self) -> bool {
        for j in 1..=self.n {
            let lhs = (self.c[j - 1] as i64 - self.w[j - 1] as i64).abs();
            let mut rhs = self.w_after_n[j - 1] as i64;
            if let Some(k) = self.k_n {
                if self.j_n + k == j + 1 {
                    rhs += 1;
                }
            }
            if self.j_n == j {
                rhs += 1;
            }
            if lhs > rhs {
                return false;
            }
        }
        true
    }

    /// Recompute `J_N` and `K_N` from the stored bits (invariant check).
    pub fn recompute_spacings(&self) -> (usize, Option<usize>) {
        let j = (1..=self.n).find(|&j| self.xi[self.n - j + 1]).expect("xi[1] is 1");
        let k = (self.n + 1..=self.horizon).find(|&i| self.xi[i]).map(|i| i - self.n);
        (j, k)
    }
}

/// Draw a joint `(C, W)` realization from one ξ-sequence.
pub fn sample_coupling(
    n: usize,
    theta: EwensParam,
    horizon: usize,
    rng: &mut ReplicateRng,
) -> Result<CouplingRealization> {
    if horizon < 2 * n {
        return Err(Error::HorizonTooSmall { horizon: horizon as u64, n: n as u64, min: 2 * n as u64 });
    }
    let table = XiTable::new(theta.theta(), horizon);
    Ok(sample_coupling_with_table(&table, n, horizon, rng))
}

/// As [`sample_coupling`] with a shared threshold table (must cover the
/// horizon).
pub fn sample_coupling_with_table(
    table: &XiTable,
    n: usize,
    horizon: usize,
    rng: &mut ReplicateRng,
) -> CouplingRealization {
    debug_assert!(horizon >= 2 * n && table.len() >= horizon);
    let mut xi = vec![false; horizon + 1];
    xi[1] = true;
    for i in 2..=horizon {
        xi[i] = table.draw(rng, i as u64);
    }

    // C: spacings of 1 ξ_2 … ξ_N 1
    let mut c = vec![0u32; n];
    let mut last = 1usize;
    for (i, &bit) in xi.iter().enumerate().take(n + 1).skip(2) {
        if bit {
            c[i - last - 1] += 1;
            last = i;
        }
    }
    let j_n = n + 1 - last;
    c[j_n - 1] += 1;

    // W and W_{jN}: spacings of the un-terminated sequence
    let mut w = vec![0u32; n];
    let mut w_after_n = vec![0u32; n];
    let mut last1 = 1usize;
    let mut k_n = None;
    for (i, &bit) in xi.iter().enumerate().take(horizon + 1).skip(2) {
        if bit {
            let j = i - last1;
            if j <= n {
                w[j - 1] += 1;
                if last1 >= n + 1 {
                    w_after_n[j - 1] += 1;
                }
            }
            if k_n.is_none() && i > n {
                k_n = Some(i - n);
            }
            last1 = i;
        }
    }

    let w_tail_bound = table.theta * table.theta / (horizon - n) as f64;
    CouplingRealization { n, horizon, xi, c, w, w_after_n, j_n, k_n, w_tail_bound }
}

/// log of the Ewens cycle-type probability (Σ j·a_j = N assumed).
fn log_cycle_type_pmf(n: usize, theta: f64, alpha: &[u64]) -> f64 {
    // ln N! - ln θ_(N) + Σ_j a_j ln(θ/j) - ln a_j!
    let mut v = KahanSum::new();
    for i in 2..=n {
        v.add((i as f64).ln());
    }
    for i in 0..n {
        v.add(-(theta + i as f64).ln());
    }
    for (idx, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let j = (idx + 1) as f64;
        v.add(a as f64 * (theta.ln() - j.ln()));
        for m in 2..=a {
            v.add(-(m as f64).ln());
        }
    }
    v.value()
}

/// Exact cycle-type pmf `ν_{N,θ}[(α_1,…)=(a_1,…)]`, computed in log space.
pub fn exact_cycle_type_pmf(n: usize, theta: EwensParam, alpha: &CycleCounts) -> Result<f64> {
    let got: u64 = alpha.alpha.iter().enumerate().map(|(i, a)| (i as u64 + 1) * a).sum();
    if got != n as u64 {
        return Err(Error::InvalidCycleType { got, expected: n as u64 });
    }
    Ok(log_cycle_type_pmf(n, theta.theta(), &alpha.alpha).exp())
}

/// All cycle types of S_n (integer partitions of n as α-vectors).
pub fn cycle_types(n: usize) -> Vec<Vec<u64>> {
    fn rec(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    let mut parts = Vec::new();
    rec(n, n, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|ps| {
            let mut alpha = vec![0u64; n];
            for p in ps {
                alpha[p - 1] += 1;
            }
            alpha
        })
        .collect()
}

/// The linear statistic `I = N∫f + Σ_j α_j·u_j` for one cycle type.
///
/// Summation runs over ascending j so that the enumeration oracle and the
/// samplers produce bit-identical values for equal cycle types.
pub fn linear_statistic(n: usize, integral: f64, series: &ErrorSeries, alpha: &[u64]) -> f64 {
    let mut v = n as f64 * integral;
    for (idx, &a) in alpha.iter().enumerate() {
        if a > 0 {
            v += a as f64 * series.u(idx + 1);
        }
    }
    v
}

/// Exact law of the linear statistic, as `(value, probability)` pairs sorted
/// by value (bit-equal values merged).
#[derive(Debug, Clone, Serialize)]
pub struct ExactDistribution {
    pub support: Vec<(f64, f64)>,
}

impl ExactDistribution {
    pub fn mean(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &(v, p) in &self.support {
            acc.add(v * p);
        }
        acc.value()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let mut acc = KahanSum::new();
        for &(v, p) in &self.support {
            acc.add((v - m) * (v - m) * p);
        }
        acc.value()
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &(_, p) in &self.support {
            acc.add(p);
        }
        acc.value()
    }

    /// Probability of a value (bit-exact lookup).
    pub fn prob_of(&self, v: f64) -> f64 {
        self.support
            .iter()
            .find(|(x, _)| x.to_bits() == v.to_bits())
            .map_or(0.0, |(_, p)| *p)
    }
}

/// Enumeration limit for the exact-law oracle: 8! permutations collapse to
/// only 22 cycle types.
pub const ENUMERATION_LIMIT: usize = 8;

/// Brute-force exact law of `I_{σ,N}(f)` by enumerating cycle types.
pub fn enumerate_exact_distribution(
    n: usize,
    theta: EwensParam,
    f: &StatisticView<'_>,
) -> Result<ExactDistribution> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { op: "enumerate_exact_distribution", n: n as u64, limit: ENUMERATION_LIMIT as u64 });
    }
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for alpha in cycle_types(n) {
        let p = log_cycle_type_pmf(n, theta.theta(), &alpha).exp();
        let mut v = linear_statistic(n, f.integral, f.series, &alpha);
        if v == 0.0 {
            v = 0.0; // normalize -0.0
        }
        pairs.push((v, p));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut support: Vec<(f64, f64)> = Vec::new();
    for (v, p) in pairs {
        match support.last_mut() {
            Some((lv, lp)) if lv.to_bits() == v.to_bits() => *lp += p,
            _ => support.push((v, p)),
        }
    }
    Ok(ExactDistribution { support })
}

/// Bundled `(∫f, series)` view used by the enumeration oracle and the
/// simulation harness so both sides evaluate the identity the same way.
pub struct StatisticView<'a> {
    pub integral: f64,
    pub series: &'a ErrorSeries,
}
