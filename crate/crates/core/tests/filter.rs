use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scar_core::armodel::{complex_normal, simulate};
use scar_core::filter::{
    adaptive_noise_estimate, enkf_step, ensemble_forecast, kalman_forecast, kalman_update, pattern_correlation,
    run_kalman, AdaptiveNoise, Ensemble, ForecastConfig, NoiseMode, Propagator,
};
use scar_core::scar::{scar3_model, scar_certificate, ScarOptions};
use scar_core::signals::simulate_ou;
use scar_core::{Complex64, Model, Series, State};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A stable AR-3 with characteristic roots strictly inside the disk.
fn stable_ar3(rng: &mut impl Rng, q: f64) -> Model {
    let z: Vec<Complex64> =
        (0..3).map(|_| Complex64::from_polar(rng.random_range(0.1..0.97), rng.random_range(0.0..std::f64::consts::TAU))).collect();
    let e1 = z[0] + z[1] + z[2];
    let e2 = z[0] * z[1] + z[0] * z[2] + z[1] * z[2];
    let e3 = z[0] * z[1] * z[2];
    Model::new(vec![e3, -e2, e1 - 1.0], q, 0.1).unwrap()
}

#[test]
fn thousand_cycles_keep_covariance_hermitian_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let model = stable_ar3(&mut rng, 0.3);
    let mut state = State::isotropic(vec![c(0.0, 0.0); 3], 2.0);
    let mut x = [c(0.0, 0.0); 3];
    for cycle in 0..1000 {
        let n = rng.random_range(1..6);
        for _ in 0..n {
            let a = model.coeffs();
            let next = x[2] + a[0] * x[0] + a[1] * x[1] + a[2] * x[2] + complex_normal(&mut rng, 0.3);
            x = [x[1], x[2], next];
        }
        let prior = kalman_forecast(&state, &model, n).unwrap();
        let r = rng.random_range(0.01..2.0);
        let (post, _) = kalman_update(&prior, x[2] + complex_normal(&mut rng, r), r).unwrap();
        let scale = 1.0 + prior.cov.frobenius_norm();
        assert!(post.cov.hermitian_defect() <= 1e-10 * scale, "cycle {cycle}");
        let min_eig = post.cov.hermitian_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        assert!(min_eig >= -1e-10 * scale, "cycle {cycle}: eigenvalue {min_eig}");
        assert!(post.observed_variance() <= prior.observed_variance() + 1e-12, "cycle {cycle}");
        state = post;
    }
}

#[test]
fn propagator_equals_repeated_single_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let model = stable_ar3(&mut rng, 0.2).with_forcing(c(0.1, -0.05));
    let s0 = State::isotropic(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.4, -1.0)], 0.7);
    let joint = Propagator::new(&model, 7).unwrap().apply(&s0);
    let mut step = s0;
    for _ in 0..7 {
        step = kalman_forecast(&step, &model, 1).unwrap();
    }
    for (a, b) in joint.mean.iter().zip(&step.mean) {
        assert!((a - b).norm() < 1e-12);
    }
    assert!(joint.cov.sub(&step.cov).frobenius_norm() < 1e-12);
}

#[test]
fn large_ensemble_matches_exact_kalman_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = stable_ar3(&mut rng, 0.4);
    let prior_mean = vec![c(0.5, -0.2), c(0.1, 0.3), c(-0.4, 0.6)];
    let (r, n, size) = (0.5, 3, 500);
    let obs = c(1.2, -0.7);

    let exact_prior = kalman_forecast(&State::isotropic(prior_mean.clone(), 1.0), &model, n).unwrap();
    let (exact, _) = kalman_update(&exact_prior, obs, r).unwrap();
    let pf = exact_prior.observed_variance();
    let pa = exact.observed_variance();
    let d = (obs - exact_prior.observed_mean()).norm();
    let mean_band = 3.0 * (pf / size as f64).sqrt() * (1.0 + d / (pf + r).sqrt());
    let var_band = 3.0 * pa * (2.0 / size as f64).sqrt();

    let mut misses = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let ens = Ensemble::sample(&prior_mean, 1.0, size, &mut rng).unwrap();
        let (post, step) = enkf_step(&ens, &model, obs, r, n, 1.0, &mut rng).unwrap();
        let m = post.mean()[2];
        let v = post.covariance()[(2, 2)].re;
        if (m - exact.observed_mean()).norm() > mean_band || (v - pa).abs() > var_band {
            misses += 1;
        }
        assert!((step.prior_variance - pf).abs() < 3.0 * pf * (2.0 / size as f64).sqrt());
    }
    // 3σ bands: an occasional miss is expected, a systematic one is not
    assert!(misses <= 1, "{misses} of 20 ensembles outside the 3σ bands");
}

#[test]
fn scar3_beats_observation_error_on_matching_ou() {
    let lambda = c(-8.312, -8.569);
    let cert = scar_certificate(lambda, &ScarOptions::default()).unwrap();
    let dt = 0.0625;
    let model = scar3_model(&cert, 1.0, dt).unwrap();
    let truth = simulate_ou(lambda, 1.0, dt, 20_000, 3).unwrap();
    let energy = 1.0 / (2.0 * 8.312);
    for n in [1, 10, 50] {
        for frac in [0.1, 1.0] {
            let r = frac * energy;
            let rep = run_kalman(&model, &truth, n, r, 9).unwrap().report;
            assert!(!rep.diverged);
            assert!(rep.posterior_rmse < r.sqrt(), "n={n} R={frac}ℰ: {} vs {}", rep.posterior_rmse, r.sqrt());
        }
    }
}

#[test]
fn explosive_model_reports_divergence() {
    // forty steps of a factor 1e10 overflow between observations
    let truth = Series::new((0..8000).map(|k| c((k as f64 * 0.1).sin(), 0.0)).collect(), 1.0, 0.0).unwrap();
    let wild = Model::new(vec![c(1e10, 0.0)], 1.0, 1.0).unwrap();
    let run = run_kalman(&wild, &truth, 40, 1e-6, 0).unwrap();
    assert!(run.report.diverged);
    assert!(run.report.posterior_rmse.is_infinite());
}

#[test]
fn batch_noise_estimate_recovers_planted_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (p, r) = (0.3, 0.05);
    let innov: Vec<Complex64> = (0..20_000).map(|_| complex_normal(&mut rng, p + r)).collect();
    let est = adaptive_noise_estimate(&innov, &vec![p; innov.len()]).unwrap();
    assert!((est - r).abs() < 0.01, "{est}");

    let mut ewma = AdaptiveNoise::new(0.999);
    for z in &innov {
        ewma.push(*z, p);
    }
    assert!((ewma.estimate().unwrap() - r).abs() < 0.03);
}

#[test]
fn ensemble_forecast_recovers_observation_noise() {
    let lambda = c(-0.4458, 3.7161);
    let dt = 12.0 / 365.0;
    let cert = scar_certificate(lambda, &ScarOptions::default()).unwrap();
    let sigma = (2.0f64 * 0.4458).sqrt();
    let model = scar3_model(&cert, sigma, dt).unwrap();
    let truth = simulate_ou(lambda, sigma, dt, 6000, 21).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let r = 0.02;
    let noisy = truth.values().iter().map(|z| z + complex_normal(&mut rng, r)).collect();
    let obs = Series::new(noisy, dt, 0.0).unwrap();
    for mode in [NoiseMode::Batch, NoiseMode::Forgetting { factor: 0.99 }] {
        let cfg = ForecastConfig { train_len: 4000, max_lead: 15, noise_mode: mode, ..ForecastConfig::default() };
        let out = ensemble_forecast(&model, &obs, Some(&truth), &cfg).unwrap();
        assert!((out.r_estimate_mean - r).abs() < 0.2 * r, "{mode:?}: {}", out.r_estimate_mean);
        if mode == NoiseMode::Batch {
            assert!((out.r_estimate - out.r_estimate_mean).abs() < 1e-12);
        }
        let (lead, _, pc0) = out.pc_curve[0];
        assert_eq!(lead, 0);
        assert!(pc0 > 0.95);
        let pcs: Vec<f64> = out.pc_curve.iter().map(|x| x.2).collect();
        assert!(pcs.first() > pcs.last());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn update_never_inflates_observed_variance(seed in 0u64..10_000, r in 1e-4..10.0f64, n in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rng.random_range(0.0..2.0);
        let model = stable_ar3(&mut rng, q);
        let prior = kalman_forecast(&State::isotropic(vec![c(0.0, 0.0); 3], rng.random_range(0.01..5.0)), &model, n).unwrap();
        let (post, gain) = kalman_update(&prior, complex_normal(&mut rng, 1.0), r).unwrap();
        prop_assert!(post.observed_variance() <= prior.observed_variance() + 1e-12);
        prop_assert!(post.observed_variance() >= -1e-12);
        let k = gain[2].re;
        prop_assert!((k - prior.observed_variance() / (prior.observed_variance() + r)).abs() < 1e-12);
    }

    #[test]
    fn pattern_correlation_is_scale_invariant(seed in 0u64..1000, a in 0.01..100.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<Complex64> = (0..50).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let v: Vec<Complex64> = (0..50).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let scaled: Vec<Complex64> = u.iter().map(|z| z * a).collect();
        let p1 = pattern_correlation(&u, &v).unwrap();
        prop_assert!((p1 - pattern_correlation(&scaled, &v).unwrap()).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&p1));
    }

    #[test]
    fn simulated_models_are_reproducible(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = stable_ar3(&mut rng, 0.1);
        prop_assert_eq!(simulate(&m, 200, seed).unwrap(), simulate(&m, 200, seed).unwrap());
    }
}
