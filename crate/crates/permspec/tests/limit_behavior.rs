//! Distributional invariants that need moderate Monte Carlo effort.

use permspec::funcs::FunctionSpec;
use permspec::limitlaw::{build_levy, cf_mu, sample_mu};
use permspec::moments::cesaro_mean;
use permspec::montecarlo::{coupling_experiment, empirical_cf};
use permspec::rng::replicate_rng;
use permspec::trapezoid::build_series;

#[test]
fn cf_and_sampler_agree_on_the_limit_law() {
    // empirical CF of 1e5 sample_mu draws matches cf_mu within 4/√reps
    let f = FunctionSpec::trig_poly(0.0, vec![0.7, 0.0, 0.4], vec![]).unwrap();
    let series = build_series(&f, 16, None).unwrap();
    let law = build_levy(&series, 1.5, 16).unwrap();
    let reps = 100_000;
    let mut rng = replicate_rng(0xCF_A9, 0);
    let draws: Vec<f64> = (0..reps).map(|_| sample_mu(&law, 1e-9, &mut rng).unwrap()).collect();
    let grid: Vec<f64> = (0..=20).map(|i| -5.0 + 0.5 * i as f64).collect();
    let emp = empirical_cf(&draws, &grid).unwrap();
    let radius = 4.0 / (reps as f64).sqrt();
    for p in &emp {
        let exact = cf_mu(&law, p.t);
        let d = ((p.re - exact.re).powi(2) + (p.im - exact.im).powi(2)).sqrt();
        assert!(d < radius, "t={}: |emp - cf| = {d} >= {radius}", p.t);
    }
}

#[test]
fn hn_draw_variance_matches_eta_at_large_n() {
    // variance of H_N draws ≈ η_N² within 5% at n = 1e5
    let f = FunctionSpec::indicator(0.0, 0.5).unwrap();
    let series = build_series(&f, 100_000, None).unwrap();
    let sampler = permspec::limitlaw::HnSampler::new(&series, 1.0, 100_000).unwrap();
    let eta_sq = permspec::limitlaw::eta_normalization(&series, 1.0, 100_000).unwrap().eta_sq;
    let mut rng = replicate_rng(0xE7A, 0);
    let reps = 20_000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..reps {
        let v = sampler.draw_sparse(&mut rng);
        s += v;
        s2 += v * v;
    }
    let var = s2 / reps as f64 - (s / reps as f64).powi(2);
    assert!((var / eta_sq - 1.0).abs() < 0.05, "var {var} vs eta^2 {eta_sq}");
}

#[test]
fn statistic_mean_matches_exact_mean_small_n() {
    // mode=statistic, n=3, θ=1, f=cos: empirical mean within 3·stderr of 1
    use permspec::montecarlo::{run_with_values, Mode, SimulationConfig};
    let f = FunctionSpec::cosine();
    let config = SimulationConfig::new(3, 1.0, f.clone(), 100_000, Mode::Statistic).with_seed(42);
    let (report, _) = run_with_values(&config).unwrap();
    let series = build_series(&f, 3, None).unwrap();
    let exact = permspec::moments::exact_mean(3, 1.0, &series, &f).unwrap();
    assert!((exact - 1.0).abs() < 1e-14);
    assert!((report.mean - exact).abs() < 3.0 * report.mean_stderr);
}

#[test]
fn coupling_lemma_bounds_hold_empirically() {
    // E[W_{jN}] ≤ θ²/(N-1) and P[J+K = j+1] ≤ θ/N per j, at 3 stderr
    for &theta in &[1.0f64, 2.0] {
        let n = 100;
        let series = build_series(&FunctionSpec::cosine(), n, None).unwrap();
        let rep = coupling_experiment(n, theta, &series.u, 20_000, 30.0, 0xC0_7731, 0).unwrap();
        assert_eq!(rep.inequality_violations, 0);
        assert!(rep.w_after_all_ok, "{:?}", rep.w_after_checks);
        assert!(rep.jk_all_ok, "{:?}", rep.jk_checks);
        // the J_N χ² should also be unremarkable here
        assert!(rep.jn_chi_square < 2.5 * (n as f64 - 1.0), "chi2 = {}", rep.jn_chi_square);
    }
}

#[test]
fn cesaro_means_of_rj_decrease_to_zero_for_indicator() {
    // |u_j| itself has Cesàro limit 1/4 for the arc indicator (that failure
    // to vanish is exactly the divergent regime); the vanishing sequence is
    // R_j = u_j/j, whose order-1 and order-2 means decrease through the
    // decades and tend to zero.
    let f = FunctionSpec::indicator(0.0, 0.5).unwrap();
    let series = build_series(&f, 100_000, None).unwrap();
    for order in [1.0f64, 2.0] {
        let mut last = f64::INFINITY;
        for &n in &[100usize, 1000, 10_000, 100_000] {
            let mut s = Vec::with_capacity(n + 1);
            s.push(0.0);
            for j in 1..=n {
                s.push(series.r(j).abs());
            }
            let m = cesaro_mean(&s, order, n);
            assert!(m < last, "order {order}: mean at n={n} is {m}, previous {last}");
            last = m;
        }
        assert!(last < 1e-3, "order {order}: final mean {last}");
    }
    // and the u-sequence means do NOT vanish: they stabilize near 1/4
    let n = 100_000;
    let mut s = vec![0.0];
    for j in 1..=n {
        s.push(series.u(j).abs());
    }
    let m = cesaro_mean(&s, 1.0, n);
    assert!((m - 0.25).abs() < 0.01, "Cesàro mean of |u| = {m}");
}
