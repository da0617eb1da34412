//! Reproducible Monte Carlo harness.
//!
//! Replicates are independent tasks seeded by a pure function of
//! `(master_seed, replicate_index)`; aggregation is ordered by replicate
//! index, so a report is bitwise identical for any worker count.

use crate::ewens::{self, StatisticView};
use crate::funcs::FunctionSpec;
use crate::limitlaw::{build_levy, HnSampler};
use crate::moments::{self, CouplingBoundKind, CouplingBoundRhs, PsiTable};
use crate::rng::{replicate_rng, XiTable};
use crate::trapezoid::{build_series, ErrorSeries};
use crate::{Error, KahanSum, Result};
use rayon::prelude::*;
use serde::Serialize;

/// What each replicate draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// The linear statistic `I = N∫f + Σ α_j u_j` from one Ewens draw.
    Statistic,
    /// The total cycle count `K(σ)`.
    CycleCounts,
    /// `|G_N - H_N|` from one joint Feller realization.
    Coupling,
    /// A centered Poissonized draw `H_N - E[H_N]`.
    HN,
    /// A draw of the limit law μ_{f,θ}.
    MuLimit,
}

/// Full description of one simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub theta: f64,
    pub function: FunctionSpec,
    pub replicates: usize,
    pub master_seed: u64,
    /// 0 = use the global thread pool.
    pub workers: usize,
    pub mode: Mode,
    /// Coupling mode: horizon = clamp(horizon_factor·n, 2n, 1e7).
    pub horizon_factor: f64,
    /// HN mode: sparse Poissonization (O(θ log N) per draw).
    pub sparse: bool,
    /// MuLimit mode: L² truncation tolerance.
    pub eps: f64,
}

impl SimulationConfig {
    pub fn new(n: usize, theta: f64, function: FunctionSpec, replicates: usize, mode: Mode) -> Self {
        Self {
            n,
            theta,
            function,
            replicates,
            master_seed: 0,
            workers: 0,
            mode,
            horizon_factor: 100.0,
            sparse: true,
            eps: 1e-3,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidConfig(format!("theta must be positive, got {}", self.theta)));
        }
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        let h = (self.horizon_factor * self.n as f64).ceil() as usize;
        h.clamp(2 * self.n, 10_000_000)
    }
}

/// Histogram over the replicate values. Integer-lattice statistics get one
/// bin per lattice point; continuous samples get Freedman–Diaconis bins.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub lattice: bool,
    /// `(center, mass)` for lattice histograms; `(bin center, mass)` with
    /// equal widths otherwise.
    pub bins: Vec<(f64, f64)>,
    pub bin_width: f64,
}

impl Histogram {
    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &(_, m) in &self.bins {
            acc.add(m);
        }
        acc.value()
    }

    fn build(values: &[f64]) -> Self {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();

        // lattice detection: few unique values, all bit-distinct
        let mut uniques: Vec<(f64, u64)> = Vec::new();
        for &v in &sorted {
            match uniques.last_mut() {
                Some((u, c)) if u.to_bits() == v.to_bits() => *c += 1,
                _ => uniques.push((v, 1)),
            }
            if uniques.len() > 1024 {
                break;
            }
        }
        if uniques.len() <= 1024 {
            let width = uniques
                .windows(2)
                .map(|w| w[1].0 - w[0].0)
                .fold(f64::INFINITY, f64::min);
            return Self {
                lattice: true,
                bins: uniques.iter().map(|&(v, c)| (v, c as f64 / m as f64)).collect(),
                bin_width: if width.is_finite() { width } else { 1.0 },
            };
        }

        // Freedman–Diaconis
        let q1 = sorted[m / 4];
        let q3 = sorted[3 * m / 4];
        let iqr = (q3 - q1).max(f64::EPSILON);
        let width = 2.0 * iqr / (m as f64).cbrt();
        let lo = sorted[0];
        let hi = sorted[m - 1];
        let nbins = (((hi - lo) / width).ceil() as usize).clamp(1, 100_000);
        let mut bins = vec![0u64; nbins];
        for &v in &sorted {
            let idx = (((v - lo) / width) as usize).min(nbins - 1);
            bins[idx] += 1;
        }
        Self {
            lattice: false,
            bins: bins
                .iter()
                .enumerate()
                .map(|(i, &c)| (lo + (i as f64 + 0.5) * width, c as f64 / m as f64))
                .collect(),
            bin_width: width,
        }
    }
}

/// One point of an empirical characteristic function.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CfPoint {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

/// Summary of one simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalReport {
    pub config: SimulationConfig,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    /// s/√m.
    pub mean_stderr: f64,
    /// √((m₄ - s⁴)/m): standard error of the sample variance.
    pub variance_stderr: f64,
    pub histogram: Histogram,
    pub cf_grid: Vec<CfPoint>,
    /// Conservative per-point comparison band 4/√m.
    pub cf_radius: f64,
    pub ks_vs_reference: Option<f64>,
    pub tv_vs_reference: Option<f64>,
}

/// Default CF comparison grid: t ∈ {-5, -4.5, …, 5}.
pub fn default_t_grid() -> Vec<f64> {
    (0..=20).map(|i| -5.0 + 0.5 * i as f64).collect()
}

fn run_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(job)
    }
}

/// Run a simulation and keep the per-replicate values (ordered by replicate
/// index).
pub fn run_with_values(config: &SimulationConfig) -> Result<(EmpiricalReport, Vec<f64>)> {
    config.validate()?;
    let n = config.n;
    let theta = config.theta;
    let series = build_series(&config.function, n, None)?;
    let integral = config.function.integral();

    let values: Vec<f64> = match config.mode {
        Mode::Statistic | Mode::CycleCounts => {
            let table = XiTable::new(theta, n);
            let count_cycles = config.mode == Mode::CycleCounts;
            let series_ref = &series;
            let table_ref = &table;
            run_pool(config.workers, move || {
                (0..config.replicates as u64)
                    .into_par_iter()
                    .map(|idx| {
                        let mut rng = replicate_rng(config.master_seed, idx);
                        let mut lengths = Vec::new();
                        ewens::sample_cycle_lengths_with_table(table_ref, n, &mut rng, &mut lengths);
                        if count_cycles {
                            lengths.len() as f64
                        } else {
                            statistic_from_lengths(n, integral, series_ref, &mut lengths)
                        }
                    })
                    .collect()
            })
        }
        Mode::Coupling => {
            let horizon = config.horizon();
            let table = XiTable::new(theta, horizon);
            let u = &series.u;
            let table_ref = &table;
            run_pool(config.workers, move || {
                (0..config.replicates as u64)
                    .into_par_iter()
                    .map(|idx| {
                        let mut rng = replicate_rng(config.master_seed, idx);
                        let rep = coupling_rep(table_ref, n, horizon, u, &mut rng);
                        rep.diff.abs()
                    })
                    .collect()
            })
        }
        Mode::HN => {
            let sampler = HnSampler::new(&series, theta, n)?;
            let sparse = config.sparse;
            let sampler_ref = &sampler;
            run_pool(config.workers, move || {
                (0..config.replicates as u64)
                    .into_par_iter()
                    .map(|idx| {
                        let mut rng = replicate_rng(config.master_seed, idx);
                        if sparse {
                            sampler_ref.draw_sparse(&mut rng)
                        } else {
                            sampler_ref.draw_dense(&mut rng)
                        }
                    })
                    .collect()
            })
        }
        Mode::MuLimit => {
            let law = build_levy(&series, theta, n)?;
            if law.tail_variance_bound >= config.eps * config.eps {
                return Err(Error::CannotMeetTolerance {
                    eps: config.eps,
                    tail: law.tail_variance_bound,
                });
            }
            let law_ref = &law;
            run_pool(config.workers, move || {
                (0..config.replicates as u64)
                    .into_par_iter()
                    .map(|idx| {
                        let mut rng = replicate_rng(config.master_seed, idx);
                        crate::limitlaw::sample_mu(law_ref, config.eps, &mut rng)
                            .expect("tolerance checked above")
                    })
                    .collect()
            })
        }
    };

    let report = summarize(config.clone(), &values);
    Ok((report, values))
}

/// Run a simulation (values are summarized and dropped).
pub fn run(config: &SimulationConfig) -> Result<EmpiricalReport> {
    run_with_values(config).map(|(r, _)| r)
}

/// The statistic from an unsorted cycle-length list; sorts and multiplies per
/// distinct length so the result is bit-identical to the enumeration oracle's
/// ascending-j evaluation.
pub fn statistic_from_lengths(
    n: usize,
    integral: f64,
    series: &ErrorSeries,
    lengths: &mut Vec<usize>,
) -> f64 {
    lengths.sort_unstable();
    let mut v = n as f64 * integral;
    let mut i = 0;
    while i < lengths.len() {
        let j = lengths[i];
        let mut count = 1u64;
        while i + 1 < lengths.len() && lengths[i + 1] == j {
            count += 1;
            i += 1;
        }
        let u = series.u(j);
        if u != 0.0 {
            v += count as f64 * u;
        }
        i += 1;
    }
    v
}

fn summarize(config: SimulationConfig, values: &[f64]) -> EmpiricalReport {
    let m = values.len() as f64;
    let mut s1 = KahanSum::new();
    for &v in values {
        s1.add(v);
    }
    let mean = s1.value() / m;
    let (mut s2, mut s3, mut s4) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for &v in values {
        let d = v - mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
    }
    let variance = s2.value() / m;
    let sd = variance.sqrt();
    let skewness = if sd > 0.0 { s3.value() / m / (sd * sd * sd) } else { 0.0 };
    let m4 = s4.value() / m;

    let t_grid = default_t_grid();
    let cf_grid = empirical_cf(values, &t_grid).expect("nonempty");

    EmpiricalReport {
        config,
        mean,
        variance,
        skewness,
        mean_stderr: sd / m.sqrt(),
        variance_stderr: ((m4 - variance * variance).max(0.0) / m).sqrt(),
        histogram: Histogram::build(values),
        cf_grid,
        cf_radius: 4.0 / m.sqrt(),
        ks_vs_reference: None,
        tv_vs_reference: None,
    }
}

// ---------------------------------------------------------------------------
// Statistical distances
// ---------------------------------------------------------------------------

/// Reference for a KS comparison.
pub enum KsReference<'a> {
    Cdf(&'a dyn Fn(f64) -> f64),
    Sample(&'a [f64]),
}

/// Kolmogorov–Smirnov distance, `sup |F̂ - F|`.
pub fn ks_distance(sample: &[f64], reference: KsReference<'_>) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    match reference {
        KsReference::Cdf(cdf) => {
            let mut xs: Vec<f64> = sample.to_vec();
            xs.sort_by(f64::total_cmp);
            let n = xs.len() as f64;
            let mut d = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                // right side of the jump, and the left limit (so references
                // with atoms at sample points are handled correctly)
                d = d.max((((i + 1) as f64) / n - cdf(x)).abs());
                d = d.max((cdf(x.next_down()) - (i as f64) / n).abs());
            }
            Ok(d)
        }
        KsReference::Sample(other) => {
            if other.is_empty() {
                return Err(Error::EmptySample);
            }
            let mut a: Vec<f64> = sample.to_vec();
            let mut b: Vec<f64> = other.to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            let (mut i, mut j) = (0usize, 0usize);
            let (na, nb) = (a.len() as f64, b.len() as f64);
            let mut d = 0.0f64;
            while i < a.len() && j < b.len() {
                let x = a[i].min(b[j]);
                while i < a.len() && a[i] <= x {
                    i += 1;
                }
                while j < b.len() && b[j] <= x {
                    j += 1;
                }
                d = d.max((i as f64 / na - j as f64 / nb).abs());
            }
            Ok(d)
        }
    }
}

/// Total-variation distance between the empirical law of `sample` (values
/// compared bit-exactly) and a reference pmf.
pub fn tv_distance_discrete(sample: &[f64], reference: &[(f64, f64)]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = sample.len() as f64;
    let mut counts: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    for &v in sample {
        let v = if v == 0.0 { 0.0 } else { v };
        *counts.entry(v.to_bits()).or_insert(0) += 1;
    }
    let mut tv = 0.0f64;
    let mut seen: std::collections::BTreeSet<u64> = std::collections::BTreeSet::new();
    for &(v, p) in reference {
        let v = if v == 0.0 { 0.0 } else { v };
        let bits = v.to_bits();
        seen.insert(bits);
        let emp = counts.get(&bits).copied().unwrap_or(0) as f64 / m;
        tv += (emp - p).abs();
    }
    for (bits, &c) in &counts {
        if !seen.contains(bits) {
            tv += c as f64 / m;
        }
    }
    Ok(0.5 * tv)
}

/// Bretagnolle–Huber–Carol 99% radius for a TV comparison against a
/// k-category multinomial with `m` draws.
pub fn tv_radius_multinomial(k: usize, m: usize, delta: f64) -> f64 {
    ((k as f64 * std::f64::consts::LN_2 + (1.0 / delta).ln()) / (2.0 * m as f64)).sqrt()
}

/// Empirical characteristic function `(1/m)Σ e^{itX}` on a grid, with the
/// conservative band 4/√m as the comparison radius.
pub fn empirical_cf(sample: &[f64], t_grid: &[f64]) -> Result<Vec<CfPoint>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = sample.len() as f64;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for &x in sample {
                let (s, c) = (t * x).sin_cos();
                re.add(c);
                im.add(s);
            }
            CfPoint { t, re: re.value() / m, im: im.value() / m }
        })
        .collect())
}

/// χ² statistic of observed counts against expected probabilities.
pub fn chi_square_statistic(observed: &[u64], expected_probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected_probs.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * total as f64;
        if e > 0.0 {
            let d = o as f64 - e;
            stat += d * d / e;
        }
    }
    stat
}

// ---------------------------------------------------------------------------
// Coupling experiments
// ---------------------------------------------------------------------------

struct CouplingRep {
    diff: f64,
    inequality_ok: bool,
    j_n: u32,
    /// `J_N + K_N - 1` when `K_N` was observed within the horizon.
    j_plus_k_minus_1: Option<u32>,
    /// sparse `(j, W_{jN})` events
    w_after: Vec<(u32, u32)>,
}

/// One streaming Feller realization: `G = Σ u_j C_j(N)`, `H = Σ u_j W_j`
/// (truncated at the horizon), plus everything needed for the pointwise
/// Theorem checks. Consumes exactly `horizon - 1` uniform draws.
fn coupling_rep(
    table: &XiTable,
    n: usize,
    horizon: usize,
    u: &[f64],
    rng: &mut crate::rng::ReplicateRng,
) -> CouplingRep {
    let mut c_list: Vec<u32> = Vec::with_capacity(32);
    let mut w_list: Vec<(u32, bool)> = Vec::with_capacity(32);
    let mut last1 = 1usize;
    let mut last_le_n = 1usize;
    let mut k_n: Option<usize> = None;

    for i in 2..=horizon {
        if table.draw(rng, i as u64) {
            let j = i - last1;
            if j <= n {
                w_list.push((j as u32, last1 >= n + 1));
            }
            if i <= n {
                c_list.push(j as u32);
                last_le_n = i;
            } else if k_n.is_none() {
                k_n = Some(i - n);
            }
            last1 = i;
        }
    }
    let j_n = n + 1 - last_le_n;
    c_list.push(j_n as u32);

    let mut g = 0.0f64;
    for &j in &c_list {
        g += u[j as usize - 1];
    }
    let mut h = 0.0f64;
    for &(j, _) in &w_list {
        h += u[j as usize - 1];
    }

    // per-j counts for the pointwise inequality
    c_list.sort_unstable();
    w_list.sort_unstable();
    let mut w_after: Vec<(u32, u32)> = Vec::new();
    for &(j, after) in &w_list {
        if after {
            match w_after.last_mut() {
                Some((lj, c)) if *lj == j => *c += 1,
                _ => w_after.push((j, 1)),
            }
        }
    }

    let j_plus_k_minus_1 = k_n.and_then(|k| {
        let j = j_n + k - 1;
        (j <= n).then_some(j as u32)
    });

    let mut inequality_ok = true;
    {
        let count_in = |list: &[u32], j: u32| -> i64 {
            let lo = list.partition_point(|&x| x < j);
            let hi = list.partition_point(|&x| x <= j);
            (hi - lo) as i64
        };
        let w_only: Vec<u32> = w_list.iter().map(|&(j, _)| j).collect();
        let mut candidates: Vec<u32> = c_list.clone();
        candidates.extend_from_slice(&w_only);
        candidates.push(j_n as u32);
        if let Some(j) = j_plus_k_minus_1 {
            candidates.push(j);
        }
        candidates.sort_unstable();
        candidates.dedup();
        for &j in &candidates {
            if j as usize > n {
                continue;
            }
            let cj = count_in(&c_list, j);
            let wj = count_in(&w_only, j);
            let mut rhs = w_after
                .iter()
                .find(|&&(wj, _)| wj == j)
                .map_or(0i64, |&(_, c)| c as i64);
            if j_plus_k_minus_1 == Some(j) {
                rhs += 1;
            }
            if j_n == j as usize {
                rhs += 1;
            }
            if (cj - wj).abs() > rhs {
                inequality_ok = false;
            }
        }
    }

    CouplingRep { diff: g - h, inequality_ok, j_n: j_n as u32, j_plus_k_minus_1, w_after }
}

/// Per-j empirical check row.
#[derive(Debug, Clone, Serialize)]
pub struct PerJCheck {
    pub j: usize,
    pub empirical: f64,
    pub bound: f64,
    pub stderr: f64,
    pub ok: bool,
}

/// Report of a coupling experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub n: usize,
    pub theta: f64,
    pub replicates: usize,
    pub horizon: usize,
    /// Bias allowance from truncating each W_j at the horizon.
    pub w_tail_bound: f64,
    pub mean_abs_diff: f64,
    pub mean_abs_diff_stderr: f64,
    pub mean_sq_diff: f64,
    pub mean_sq_diff_stderr: f64,
    /// Realizations violating the pointwise coupling inequality (must be 0).
    pub inequality_violations: u64,
    pub l1_bound: CouplingBoundRhs,
    pub l2_bound: CouplingBoundRhs,
    /// E|G-H| divided by the summed L1 structural components.
    pub implied_c_l1: f64,
    /// E(G-H)² divided by the summed L2 structural components.
    pub implied_c_l2: f64,
    /// E[W_{jN}] ≤ θ²/(N-1) per j (worst rows reported).
    pub w_after_checks: Vec<PerJCheck>,
    pub w_after_all_ok: bool,
    /// χ² of the J_N histogram against (θ/N)Ψ_N(j).
    pub jn_chi_square: f64,
    pub jn_df: usize,
    pub jn_counts: Vec<u64>,
    /// P[J+K = j+1] ≤ θ/N per j (worst rows reported).
    pub jk_checks: Vec<PerJCheck>,
    pub jk_all_ok: bool,
}

/// Joint coupling experiment: empirical `E|G-H|`, `E(G-H)²`, the structural
/// bound components, and the per-lemma empirical checks.
pub fn coupling_experiment(
    n: usize,
    theta: f64,
    u: &[f64],
    replicates: usize,
    horizon_factor: f64,
    master_seed: u64,
    workers: usize,
) -> Result<CouplingReport> {
    if u.len() != n {
        return Err(Error::InvalidConfig(format!("u has length {}, expected n = {n}", u.len())));
    }
    let horizon = ((horizon_factor * n as f64).ceil() as usize).clamp(2 * n, 10_000_000);
    if horizon < 2 * n {
        return Err(Error::HorizonTooSmall {
            horizon: horizon as u64,
            n: n as u64,
            min: 2 * n as u64,
        });
    }
    let table = XiTable::new(theta, horizon);
    let table_ref = &table;

    let reps: Vec<CouplingRep> = run_pool(workers, move || {
        (0..replicates as u64)
            .into_par_iter()
            .map(|idx| {
                let mut rng = replicate_rng(master_seed, idx);
                coupling_rep(table_ref, n, horizon, u, &mut rng)
            })
            .collect()
    });

    // ordered sequential aggregation for bitwise determinism
    let m = replicates as f64;
    let (mut s_abs, mut s_abs2, mut s_sq, mut s_sq2) =
        (KahanSum::new(), KahanSum::new(), KahanSum::new(), KahanSum::new());
    let mut violations = 0u64;
    let mut w_after_sum = vec![0u64; n];
    let mut jn_counts = vec![0u64; n];
    let mut jk_counts = vec![0u64; n];
    for rep in &reps {
        let a = rep.diff.abs();
        s_abs.add(a);
        s_abs2.add(a * a);
        let q = rep.diff * rep.diff;
        s_sq.add(q);
        s_sq2.add(q * q);
        if !rep.inequality_ok {
            violations += 1;
        }
        jn_counts[rep.j_n as usize - 1] += 1;
        if let Some(j) = rep.j_plus_k_minus_1 {
            jk_counts[j as usize - 1] += 1;
        }
        for &(j, c) in &rep.w_after {
            w_after_sum[j as usize - 1] += c as u64;
        }
    }
    let mean_abs = s_abs.value() / m;
    let var_abs = (s_abs2.value() / m - mean_abs * mean_abs).max(0.0);
    let mean_sq = s_sq.value() / m;
    let var_sq = (s_sq2.value() / m - mean_sq * mean_sq).max(0.0);

    // Lemma checks
    let w_bound = theta * theta / (n as f64 - 1.0).max(1.0);
    let mut w_after_checks = Vec::new();
    let mut w_after_all_ok = true;
    for j in 1..=n {
        let emp = w_after_sum[j - 1] as f64 / m;
        let stderr = (emp / m).sqrt();
        let ok = emp <= w_bound + 3.0 * stderr;
        if !ok || w_after_checks.len() < 4 {
            w_after_checks.push(PerJCheck { j, empirical: emp, bound: w_bound, stderr, ok });
        }
        w_after_all_ok &= ok;
    }

    let psi = PsiTable::new(n, theta);
    let probs: Vec<f64> = (1..=n).map(|j| psi.jn_pmf(j)).collect();
    let jn_chi_square = chi_square_statistic(&jn_counts, &probs);

    let jk_bound = theta / n as f64;
    let mut jk_checks = Vec::new();
    let mut jk_all_ok = true;
    for j in 1..=n {
        let emp = jk_counts[j - 1] as f64 / m;
        let stderr = (emp * (1.0 - emp) / m).sqrt();
        let ok = emp <= jk_bound + 3.0 * stderr;
        if !ok || jk_checks.len() < 4 {
            jk_checks.push(PerJCheck { j, empirical: emp, bound: jk_bound, stderr, ok });
        }
        jk_all_ok &= ok;
    }

    let l1 = moments::coupling_bound_rhs(n, theta, u, CouplingBoundKind::L1);
    let l2 = moments::coupling_bound_rhs(n, theta, u, CouplingBoundKind::L2);
    let l1_total = l1.total();
    let l2_total = l2.total();

    Ok(CouplingReport {
        n,
        theta,
        replicates,
        horizon,
        w_tail_bound: theta * theta / (horizon - n) as f64,
        mean_abs_diff: mean_abs,
        mean_abs_diff_stderr: (var_abs / m).sqrt(),
        mean_sq_diff: mean_sq,
        mean_sq_diff_stderr: (var_sq / m).sqrt(),
        inequality_violations: violations,
        l1_bound: l1,
        l2_bound: l2,
        implied_c_l1: if l1_total > 0.0 { mean_abs / l1_total } else { 0.0 },
        implied_c_l2: if l2_total > 0.0 { mean_sq / l2_total } else { 0.0 },
        w_after_checks,
        w_after_all_ok,
        jn_chi_square,
        jn_df: n - 1,
        jn_counts,
        jk_checks,
        jk_all_ok,
    })
}

// ---------------------------------------------------------------------------
// Enumeration verification
// ---------------------------------------------------------------------------

/// Verification of the full stack against the brute-force oracle.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub theta: f64,
    pub replicates: usize,
    pub pmf_total_mass: f64,
    pub formula_mean: f64,
    pub enumeration_mean: f64,
    pub formula_variance: f64,
    pub enumeration_variance: f64,
    pub tv_sampled_vs_exact: f64,
    pub tv_radius: f64,
    pub pass: bool,
}

/// Limits for [`verify_against_enumeration`].
pub const VERIFY_LIMIT: usize = 7;

/// Compare (a) the closed-form mean/variance against enumeration and (b) the
/// sampler's empirical law against the exact law in TV distance with a
/// 99% multinomial radius.
pub fn verify_against_enumeration(
    n: usize,
    theta: f64,
    f: &FunctionSpec,
    replicates: usize,
    master_seed: u64,
) -> Result<VerificationReport> {
    if n > VERIFY_LIMIT {
        return Err(Error::TooLarge {
            op: "verify_against_enumeration",
            n: n as u64,
            limit: VERIFY_LIMIT as u64,
        });
    }
    let series = build_series(f, n, None)?;
    let integral = f.integral();
    let view = StatisticView { integral, series: &series };
    let exact = ewens::enumerate_exact_distribution(n, crate::ewens::EwensParam::new(theta)?, &view)?;

    let formula_mean = moments::exact_mean(n, theta, &series, f)?;
    let formula_variance = moments::exact_variance(n, theta, &series)?;

    let config = SimulationConfig::new(n, theta, f.clone(), replicates, Mode::Statistic)
        .with_seed(master_seed);
    let (_, values) = run_with_values(&config)?;
    let tv = tv_distance_discrete(&values, &exact.support)?;
    let radius = tv_radius_multinomial(ewens::cycle_types(n).len(), replicates, 0.01);

    let mean_ok = (formula_mean - exact.mean()).abs() <= 1e-9;
    let var_ok = (formula_variance - exact.variance()).abs() <= 1e-9;
    let tv_ok = tv < radius;

    Ok(VerificationReport {
        n,
        theta,
        replicates,
        pmf_total_mass: exact.total_mass(),
        formula_mean,
        enumeration_mean: exact.mean(),
        formula_variance,
        enumeration_variance: exact.variance(),
        tv_sampled_vs_exact: tv,
        tv_radius: radius,
        pass: mean_ok && var_ok && tv_ok && (exact.total_mass() - 1.0).abs() < 1e-12,
    })
}
