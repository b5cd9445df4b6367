//! Statistical checks on the sampler and the simulation harness.

use lnratio::montecarlo::{run_cell_statistic, DEFAULT_MAX_DRAWS};
use lnratio::{
    exact_mean_kn, exact_var_kn, expected_k_n, rng, run_cell, run_grid, sd_k_hat, var_k_n,
    CellSpec, GridConfig, LogNormalParams, LogNormalSampler, Statistic,
};

fn draws_at_ln2(seed: u64) -> LogNormalSampler {
    LogNormalSampler::new(
        LogNormalParams::new(0.0, std::f64::consts::LN_2).unwrap(),
        seed,
    )
}

#[test]
fn ratio_of_independent_variates_has_mean_omega() {
    let mut s = draws_at_ln2(rng::derive_seed(11, 0));
    let runs = 1_000_000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..runs {
        let r = s.draw() / s.draw();
        sum += r;
        sum2 += r * r;
    }
    let mean = sum / runs as f64;
    let se = ((sum2 / runs as f64 - mean * mean) / runs as f64).sqrt();
    assert!((mean - 2.0).abs() < 5.0 * se, "mean {mean}, se {se}");
}

#[test]
fn shared_denominator_covariance() {
    let mut s = draws_at_ln2(rng::derive_seed(11, 1));
    let runs = 1_000_000usize;
    let mut products = Vec::with_capacity(runs);
    let (mut su, mut sv) = (0.0, 0.0);
    let mut pairs = Vec::with_capacity(runs);
    for _ in 0..runs {
        let (x1, x2, x3) = (s.draw(), s.draw(), s.draw());
        let (u, v) = (x1 / x2, x3 / x2);
        su += u;
        sv += v;
        pairs.push((u, v));
    }
    let (mu, mv) = (su / runs as f64, sv / runs as f64);
    for &(u, v) in &pairs {
        products.push((u - mu) * (v - mv));
    }
    let cov = products.iter().sum::<f64>() / (runs as f64 - 1.0);
    let var_p = products.iter().map(|p| (p - cov) * (p - cov)).sum::<f64>() / (runs as f64 - 1.0);
    let se = (var_p / runs as f64).sqrt();
    // omega^3 - omega^2 at omega = 2
    assert!((cov - 4.0).abs() < 5.0 * se, "cov {cov}, se {se}");
}

#[test]
fn simulated_kn_moments_match_oracle() {
    let spec = CellSpec::new(4, 1.0, 400_000, 2024);
    let cell = run_cell_statistic(&spec, Statistic::KN, DEFAULT_MAX_DRAWS).unwrap();
    let omega = 2.0;
    assert_eq!(cell.pred_mean, expected_k_n(4, 1.0).unwrap());
    assert!((cell.mean_khat - exact_mean_kn(4, omega).unwrap()).abs() < 4.0 * cell.se_mean);
    let sd = exact_var_kn(4, omega).unwrap().sqrt();
    assert!(
        (cell.sd_khat / sd - 1.0).abs() < 0.05,
        "{} vs {}",
        cell.sd_khat,
        sd
    );
    assert_eq!(exact_var_kn(4, omega).unwrap(), var_k_n(4, 1.0).unwrap());
}

#[test]
fn unbiased_at_n10_cv05() {
    let cell = run_cell(
        &CellSpec::new(10, 0.5, 1_000_000, 0xC0FFEE),
        DEFAULT_MAX_DRAWS,
    )
    .unwrap();
    assert!(
        (cell.mean_khat - 0.25).abs() <= 4.0 * cell.se_mean,
        "{cell:?}"
    );
    let sd = sd_k_hat(10, 0.25).unwrap();
    assert!(
        (cell.sd_khat / sd - 1.0).abs() < 0.05,
        "{} vs {}",
        cell.sd_khat,
        sd
    );
}

#[test]
fn kn_and_khat_differ_by_the_correction_factor() {
    for (n, cv) in [(2, 0.5), (10, 1.0), (37, 0.2)] {
        let spec = CellSpec::new(n, cv, 20_000, 5);
        let khat = run_cell_statistic(&spec, Statistic::KHat, DEFAULT_MAX_DRAWS).unwrap();
        let kn = run_cell_statistic(&spec, Statistic::KN, DEFAULT_MAX_DRAWS).unwrap();
        let factor = (n as f64 - 1.0) / n as f64;
        let rel = (kn.mean_khat / khat.mean_khat - factor).abs() / factor;
        assert!(rel < 1e-12, "n={n}: {rel}");
    }
}

#[test]
fn location_does_not_affect_khat() {
    let base = CellSpec::new(6, 0.7, 50_000, 8);
    let a = run_cell(&base, DEFAULT_MAX_DRAWS).unwrap();
    let b = run_cell(&base.with_mu_y(3.0), DEFAULT_MAX_DRAWS).unwrap();
    // Same Gaussian stream, so every run is the same sample up to scale e^3.
    assert!((a.mean_khat - b.mean_khat).abs() <= 1e-10 * a.mean_khat);
    assert!((a.sd_khat - b.sd_khat).abs() <= 1e-9 * a.sd_khat);
}

#[test]
fn grid_is_reproducible() {
    let cfg = GridConfig {
        runs_override: Some(5_000),
        ..GridConfig::default()
    };
    let a = run_grid(&cfg, DEFAULT_MAX_DRAWS).unwrap();
    let b = run_grid(&cfg, DEFAULT_MAX_DRAWS).unwrap();
    assert_eq!(a.len(), 9);
    assert_eq!(a, b);
    for cell in &a {
        assert_eq!(cell.pred_mean, cell.cv * cell.cv);
    }
    // each cell matches its standalone run: order of execution is irrelevant
    let specs = cfg.cells().unwrap();
    assert_eq!(run_cell(&specs[4], DEFAULT_MAX_DRAWS).unwrap(), a[4]);
}
