use std::sync::OnceLock;

use proptest::prelude::*;
use scar_core::algebra::Budget;
use scar_core::armodel::consistency_residuals;
use scar_core::scar::{
    consistency_family, scar3_model, scar_certificate, surface_vars, verify_stability_margin, ScarCertificate, ScarOptions,
    SearchPath,
};
use scar_core::signals::DAY_DT;
use scar_core::{Complex64, Error};

const MODE8: Complex64 = Complex64::new(-8.312, -8.569);
const MODE1: Complex64 = Complex64::new(-1.246, -1.214);

fn mode8() -> &'static ScarCertificate {
    static CERT: OnceLock<ScarCertificate> = OnceLock::new();
    CERT.get_or_init(|| scar_certificate(MODE8, &ScarOptions::default()).unwrap())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn mode8_example_reproduced() {
    let cert = mode8();
    assert!((cert.dt_hat - 0.145).abs() <= 1e-3, "dt_hat = {}", cert.dt_hat);
    let want = [c(-0.251, 3.147), c(4.657, -2.010), c(-12.718, -9.706)];
    let got = cert.coefficients_per_dt().unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g.re - w.re).abs() <= 2e-3 && (g.im - w.im).abs() <= 2e-3, "{g} vs {w}");
    }
}

#[test]
fn mode1_bound_reproduced() {
    let cert = scar_certificate(MODE1, &ScarOptions::default()).unwrap();
    assert!((cert.dt_hat - 1.006).abs() <= 5e-3, "dt_hat = {}", cert.dt_hat);
    verify_stability_margin(&cert, 99).unwrap();
}

#[test]
fn printed_example_satisfies_both_identities() {
    // coefficients as printed, per unit dt
    let a = [c(-0.251, 3.147), c(4.657, -2.010), c(-12.718, -9.706)];
    let [r1, r2] = consistency_residuals(&a, MODE8);
    assert!(r1 <= 3e-3 && r2 <= 3e-3, "{r1} {r2}");
}

#[test]
fn printed_rmm_row_satisfies_both_identities() {
    let a = [c(-0.0381, 0.0083), c(0.0836, -0.0777), c(-0.0601, 0.1916)];
    let ldt = c(-0.4458, 3.7161) * DAY_DT;
    let sum: Complex64 = a.iter().sum();
    assert!((sum - c(-0.0146, 0.1222)).norm() < 1e-4);
    assert!((ldt - c(-0.01466, 0.12217)).norm() < 1e-5);
    let [r1, r2] = consistency_residuals(&a, ldt);
    assert!(r1 <= 3e-3 && r2 <= 3e-3, "{r1} {r2}");
}

#[test]
fn oracle_samples_are_stable_and_touch_boundary() {
    let cert = mode8();
    let rep = &cert.oracle_report;
    assert_eq!(rep.sampled_dts.len(), 99);
    assert!(rep.max_root_moduli.iter().all(|m| *m < 1.0));
    assert!((rep.boundary_modulus_at_dt_hat - 1.0).abs() <= 1e-6);
    let fam = consistency_family(cert.lambda).unwrap();
    assert!(fam.max_root_modulus(cert.s_hat, cert.dt_hat * 1.05) > 1.0);
}

#[test]
fn corrupted_certificates_are_refuted() {
    let mut shifted = mode8().clone();
    shifted.s_hat += c(0.4, -0.3);
    assert!(matches!(verify_stability_margin(&shifted, 99), Err(Error::CertificateRefuted { .. })));

    let mut stretched = mode8().clone();
    stretched.dt_hat *= 1.25;
    assert!(matches!(verify_stability_margin(&stretched, 99), Err(Error::CertificateRefuted { .. })));
}

#[test]
fn models_inside_interval_are_stable_and_consistent() {
    let cert = mode8();
    for k in 1..10 {
        let dt = cert.dt_hat * k as f64 / 10.0;
        let m = scar3_model(cert, 1.3, dt).unwrap();
        assert!(m.is_stable().stable);
        let check = m.is_consistent(MODE8, 2).unwrap();
        assert!(check.consistent, "{:?}", check.residuals);
        assert!((m.noise_variance() - 1.69 * dt).abs() < 1e-12);
    }
}

#[test]
fn step_outside_interval_is_rejected() {
    let cert = mode8();
    for dt in [cert.dt_hat, cert.dt_hat * 1.5, 0.0, -0.1] {
        assert!(matches!(scar3_model(cert, 1.0, dt), Err(Error::StepOutsideInterval { .. })));
    }
}

#[test]
fn unstable_lambda_is_rejected() {
    for l in [c(1.0, 0.0), c(0.0, 2.0)] {
        assert!(matches!(scar_certificate(l, &ScarOptions::default()), Err(Error::UnstableContinuousDynamics(_))));
    }
}

#[test]
fn certificate_json_round_trip() {
    let cert = mode8();
    let back = ScarCertificate::from_json(&cert.to_json().unwrap()).unwrap();
    assert_eq!(&back, cert);
}

#[test]
fn zero_budget_and_numeric_paths_agree() {
    let starved = ScarOptions {
        budget: Budget { max_seconds: Some(0.0), ..Budget::default() },
        ..ScarOptions::default()
    };
    let a = scar_certificate(MODE8, &starved).unwrap();
    let b = scar_certificate(MODE8, &ScarOptions { numeric_only: true, ..ScarOptions::default() }).unwrap();
    for cert in [&a, &b] {
        assert_ne!(cert.search_path, SearchPath::Exact);
        assert!((cert.dt_hat - mode8().dt_hat).abs() < 1e-6);
        assert!((cert.s_hat - mode8().s_hat).norm() < 1e-5);
    }
}

#[test]
fn surface_vanishes_where_a_root_meets_the_circle() {
    // at (ŝ, δ̂t) some root has modulus one, so r(α, β, δ̂t) = 0 up to rounding
    let cert = mode8();
    let r = cert.r_surface.with_vars(&surface_vars()).unwrap().to_f64();
    let magnitude = r.map_coeffs(|c| c.abs());
    // value relative to Σ |term|, so cancellation is measured, not size
    let rel = |s: Complex64, dt: f64| r.eval(&[s.re, s.im, dt]).abs() / magnitude.eval(&[s.re.abs(), s.im.abs(), dt]);
    assert!(rel(cert.s_hat, cert.dt_hat) < 1e-8, "{}", rel(cert.s_hat, cert.dt_hat));
    assert!(rel(cert.s_hat, cert.dt_hat * 0.5) > 1e-4, "{}", rel(cert.s_hat, cert.dt_hat * 0.5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn small_steps_keep_roots_near_one(lre in -10.0..-0.1f64, lim in -10.0..10.0f64, sre in -2.0..2.0f64, sim in -2.0..2.0f64) {
        // at δt → 0 the family collapses to Π = (1 − x)x², so one root sits at 1
        let fam = consistency_family(c(lre, lim)).unwrap();
        let m = fam.max_root_modulus(c(sre, sim), 1e-9);
        prop_assert!((m - 1.0).abs() < 1e-6);
    }
}
