//! Independent oracles: everything here recomputes expected values by routes
//! that share no code with the implementation under test (permutation-level
//! enumeration, direct Bernoulli products, log-gamma identities, literal
//! quadrature).

use permspec::ewens::{
    cycle_types, enumerate_exact_distribution, exact_cycle_type_pmf, sample_cycle_counts_with_table,
    CycleCounts, EwensParam, StatisticView,
};
use permspec::funcs::FunctionSpec;
use permspec::moments::{exact_mean, exact_variance, psi, PsiTable};
use permspec::montecarlo::{chi_square_statistic, tv_distance_discrete};
use permspec::rng::{replicate_rng, XiTable};
use permspec::trapezoid::{build_series, rj_direct};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;
use std::collections::BTreeMap;

/// All permutations of {0..n-1} (n ≤ 7 keeps this tiny).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, n, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out
}

fn cycle_type_of(perm: &[usize]) -> Vec<u64> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut alpha = vec![0u64; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        alpha[len - 1] += 1;
    }
    alpha
}

/// Exact Ewens law over cycle types by brute-force permutation enumeration
/// with weights θ^{K(σ)}/θ_(N).
fn permutation_level_law(n: usize, theta: f64) -> BTreeMap<Vec<u64>, f64> {
    let mut theta_rising = 1.0;
    for i in 0..n {
        theta_rising *= theta + i as f64;
    }
    let mut law: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for perm in permutations(n) {
        let alpha = cycle_type_of(&perm);
        let k: u64 = alpha.iter().sum();
        *law.entry(alpha).or_insert(0.0) += theta.powi(k as i32) / theta_rising;
    }
    law
}

#[test]
fn cycle_type_pmf_matches_permutation_enumeration() {
    for n in 1..=6usize {
        for &theta in &[0.5f64, 1.0, 2.0] {
            let law = permutation_level_law(n, theta);
            let mut total = 0.0;
            for (alpha, &p_oracle) in &law {
                let cc = CycleCounts::new(n, alpha.clone()).unwrap();
                let p = exact_cycle_type_pmf(n, EwensParam::new(theta).unwrap(), &cc).unwrap();
                assert!(
                    (p - p_oracle).abs() < 1e-12,
                    "n={n} theta={theta} alpha={alpha:?}: {p} vs {p_oracle}"
                );
                total += p_oracle;
            }
            assert!((total - 1.0).abs() < 1e-12);
            assert_eq!(law.len(), cycle_types(n).len());
        }
    }
}

#[test]
fn frozen_small_case_probabilities() {
    // S_3, θ=1: P[three fixed points] = 1/6, P[one 1-cycle + one 2-cycle] = 1/2
    let law = permutation_level_law(3, 1.0);
    assert!((law[&vec![3, 0, 0]] - 1.0 / 6.0).abs() < 1e-15);
    assert!((law[&vec![1, 1, 0]] - 0.5).abs() < 1e-15);
    // S_3, θ=2: P[three fixed points] = 1/3, P[3-cycle] = 1/6
    let law = permutation_level_law(3, 2.0);
    assert!((law[&vec![3, 0, 0]] - 1.0 / 3.0).abs() < 1e-15);
    assert!((law[&vec![0, 0, 1]] - 1.0 / 6.0).abs() < 1e-15);
    // S_4 uniform: fixed-point counts {0,1,2,4} carry weights {9,8,6,1}/24
    let law = permutation_level_law(4, 1.0);
    let mut by_fixed: BTreeMap<u64, f64> = BTreeMap::new();
    for (alpha, p) in &law {
        *by_fixed.entry(alpha[0]).or_insert(0.0) += p;
    }
    assert!((by_fixed[&0] - 9.0 / 24.0).abs() < 1e-15);
    assert!((by_fixed[&1] - 8.0 / 24.0).abs() < 1e-15);
    assert!((by_fixed[&2] - 6.0 / 24.0).abs() < 1e-15);
    assert!((by_fixed[&4] - 1.0 / 24.0).abs() < 1e-15);
}

#[test]
fn moment_formulas_match_permutation_enumeration() {
    let funcs = [
        FunctionSpec::cosine(),
        FunctionSpec::indicator(0.0, 0.5).unwrap(),
        FunctionSpec::smooth_plateau(0.2, 0.4, 0.1).unwrap(),
    ];
    for n in 1..=6usize {
        for &theta in &[0.5f64, 1.0, 2.0] {
            let law = permutation_level_law(n, theta);
            for f in &funcs {
                let series = build_series(f, n, None).unwrap();
                let integral = f.integral();
                let mut mean = 0.0;
                let mut second = 0.0;
                for (alpha, &p) in &law {
                    let v = permspec::ewens::linear_statistic(n, integral, &series, alpha);
                    mean += p * v;
                    second += p * v * v;
                }
                let var_oracle = second - mean * mean;
                let m = exact_mean(n, theta, &series, f).unwrap();
                let v = exact_variance(n, theta, &series).unwrap();
                assert!(
                    (m - mean).abs() < 1e-10,
                    "mean n={n} θ={theta} {f}: {m} vs {mean}"
                );
                assert!(
                    (v - var_oracle).abs() < 1e-10,
                    "var n={n} θ={theta} {f}: {v} vs {var_oracle}"
                );
            }
        }
    }
}

#[test]
fn enumeration_distribution_matches_permutation_law() {
    let f = FunctionSpec::indicator(0.0, 0.5).unwrap();
    for &theta in &[0.5f64, 2.0] {
        let n = 5;
        let series = build_series(&f, n, None).unwrap();
        let view = StatisticView { integral: f.integral(), series: &series };
        let dist = enumerate_exact_distribution(n, EwensParam::new(theta).unwrap(), &view).unwrap();
        let law = permutation_level_law(n, theta);
        let mut oracle: BTreeMap<u64, f64> = BTreeMap::new();
        for (alpha, &p) in &law {
            let v = permspec::ewens::linear_statistic(n, f.integral(), &series, alpha);
            let v = if v == 0.0 { 0.0 } else { v };
            *oracle.entry(v.to_bits()).or_insert(0.0) += p;
        }
        assert_eq!(dist.support.len(), oracle.len());
        for (v, p) in &dist.support {
            let q = oracle[&v.to_bits()];
            assert!((p - q).abs() < 1e-12);
        }
    }
}

#[test]
fn psi_matches_log_gamma_route() {
    // Ψ_N(j) = Γ(N-j+θ)Γ(N+1) / (Γ(N-j+1)Γ(N+θ))
    for &(n, theta) in &[(5usize, 0.5f64), (17, 1.0), (40, 2.5), (300, 7.5), (300, 0.2)] {
        for j in [1usize, 2, n / 2, n] {
            let lg = (ln_gamma(n as f64 - j as f64 + theta) + ln_gamma(n as f64 + 1.0)
                - ln_gamma(n as f64 - j as f64 + 1.0)
                - ln_gamma(n as f64 + theta))
                .exp();
            let p = psi(n, theta, j).unwrap();
            assert!(
                (p - lg).abs() < 1e-11 * p.max(1e-30),
                "n={n} theta={theta} j={j}: {p} vs {lg}"
            );
        }
    }
}

#[test]
fn jn_law_matches_direct_bernoulli_products() {
    // P[J_N = j] from the ξ definition: ξ_{N-j+1}=1 and ξ_i=0 for i>N-j+1,
    // with p_i = θ/(θ+i-1) and ξ_1 ≡ 1.
    for &(n, theta) in &[(6usize, 0.5f64), (10, 2.0), (25, 1.0)] {
        let table = PsiTable::new(n, theta);
        let p_of = |i: usize| -> f64 {
            if i == 1 {
                1.0
            } else {
                theta / (theta + i as f64 - 1.0)
            }
        };
        let mut total = 0.0;
        for j in 1..=n {
            let start = n - j + 1;
            let mut prob = p_of(start);
            for i in start + 1..=n {
                prob *= 1.0 - p_of(i);
            }
            let formula = table.jn_pmf(j);
            assert!(
                (prob - formula).abs() < 1e-14,
                "n={n} theta={theta} j={j}: {prob} vs {formula}"
            );
            total += prob;
        }
        assert!((total - 1.0).abs() < 1e-13);
    }
}

#[test]
fn sampler_chi_square_against_exact_pmf() {
    // χ² goodness of fit of 10^5 sampled cycle types at significance 1e-3
    for &(n, theta) in &[(5usize, 1.0f64), (6, 2.0), (4, 0.5)] {
        let types = cycle_types(n);
        let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        let probs: Vec<f64> = types
            .iter()
            .enumerate()
            .map(|(i, alpha)| {
                index.insert(alpha.clone(), i);
                let cc = CycleCounts::new(n, alpha.clone()).unwrap();
                exact_cycle_type_pmf(n, EwensParam::new(theta).unwrap(), &cc).unwrap()
            })
            .collect();
        let table = XiTable::new(theta, n);
        let mut rng = replicate_rng(2024, 17);
        let reps = 100_000;
        let mut counts = vec![0u64; types.len()];
        for _ in 0..reps {
            let c = sample_cycle_counts_with_table(&table, n, &mut rng);
            counts[index[&c.alpha]] += 1;
        }
        let stat = chi_square_statistic(&counts, &probs);
        let crit = ChiSquared::new((types.len() - 1) as f64)
            .unwrap()
            .inverse_cdf(1.0 - 1e-3);
        assert!(stat < crit, "n={n} theta={theta}: chi2 {stat} >= {crit}");
    }
}

#[test]
fn sampled_law_tv_small_at_n3() {
    // law {0: 1/2, 2: 1/2} for f=cos at n=2, θ=1
    let f = FunctionSpec::cosine();
    let series = build_series(&f, 2, None).unwrap();
    let view = StatisticView { integral: f.integral(), series: &series };
    let exact = enumerate_exact_distribution(2, EwensParam::new(1.0).unwrap(), &view).unwrap();
    let table = XiTable::new(1.0, 2);
    let mut rng = replicate_rng(5, 0);
    let reps = 50_000;
    let mut values = Vec::with_capacity(reps);
    let mut lengths = Vec::new();
    for _ in 0..reps {
        permspec::ewens::sample_cycle_lengths_with_table(&table, 2, &mut rng, &mut lengths);
        let mut ls = lengths.clone();
        values.push(permspec::montecarlo::statistic_from_lengths(
            2,
            f.integral(),
            &series,
            &mut ls,
        ));
    }
    let tv = tv_distance_discrete(&values, &exact.support).unwrap();
    assert!(tv < 0.01, "tv = {tv}");
}

#[test]
fn marginal_w_poisson_means() {
    // W_j from the joint coupling has mean θ/j (horizon ≥ 100·n)
    let n = 50;
    let theta = 1.5;
    let horizon = 100 * n;
    let table = XiTable::new(theta, horizon);
    let mut rng = replicate_rng(8, 8);
    let reps = 30_000;
    let mut sums = vec![0u64; n];
    for _ in 0..reps {
        let real = permspec::ewens::sample_coupling_with_table(&table, n, horizon, &mut rng);
        for (i, &w) in real.w.iter().enumerate() {
            sums[i] += w as u64;
        }
    }
    for j in [1usize, 2, 5, 10] {
        let emp = sums[j - 1] as f64 / reps as f64;
        let lambda = theta / j as f64;
        let stderr = (lambda / reps as f64).sqrt();
        assert!(
            (emp - lambda).abs() < 4.0 * stderr + theta * theta / (horizon - n) as f64,
            "j={j}: {emp} vs {lambda}"
        );
    }
}

#[test]
fn integral_consistency_with_large_j_trapezoid_sum() {
    // |∫f - trapezoidal sum at j = 10^5| small per family
    let ind = FunctionSpec::indicator(0.3, 0.77).unwrap();
    assert!(rj_direct(&ind, 100_000).abs() <= 1e-4);
    let trig = FunctionSpec::trig_poly(0.4, vec![0.3, 0.0, -0.2], vec![0.1]).unwrap();
    assert!(rj_direct(&trig, 100_000).abs() <= 1e-10);
    let pl = FunctionSpec::smooth_plateau(0.2, 0.4, 0.1).unwrap();
    assert!(rj_direct(&pl, 100_000).abs() <= 1e-10);
}

#[test]
fn variance_routes_agree_at_full_scale() {
    // the θ=1 suffix-sum path and the FFT path must agree at the sizes the
    // Gaussian-regime normalization uses
    let f = FunctionSpec::indicator(0.0, 0.5).unwrap();
    let s = build_series(&f, 1_000_000, None).unwrap();
    let a = permspec::moments::exact_variance_theta1(1_000_000, &s);
    let b = permspec::moments::exact_variance_fft(1_000_000, 1.0, &s);
    assert!((a - b).abs() < 1e-9 * a, "{a} vs {b}");
}

#[test]
fn watterson_theta1_reduces_to_inverse_products() {
    // E[Π α_j^[r_j]] = Π (1/j)^{r_j} · 1_{m≤N} at θ=1; spot-check against the
    // permutation oracle for E[α_1^[2]] and E[α_1 α_2] at n = 5
    let n = 5;
    let law = permutation_level_law(n, 1.0);
    let mut e_a1_fall2 = 0.0;
    let mut e_a1a2 = 0.0;
    for (alpha, &p) in &law {
        e_a1_fall2 += p * (alpha[0] * alpha[0].saturating_sub(1)) as f64;
        e_a1a2 += p * (alpha[0] * alpha[1]) as f64;
    }
    let f2 = permspec::moments::falling_factorial_moment(n, 1.0, &[(1, 2)]);
    let f11 = permspec::moments::falling_factorial_moment(n, 1.0, &[(1, 1), (2, 1)]);
    assert!((f2 - 1.0).abs() < 1e-14 && (e_a1_fall2 - 1.0).abs() < 1e-12);
    assert!((f11 - 0.5).abs() < 1e-14 && (e_a1a2 - 0.5).abs() < 1e-12);
}
