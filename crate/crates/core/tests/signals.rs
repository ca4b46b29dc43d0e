use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use scar_core::signals::{
    advance, dft_coefficient, equilibrium_stats, fourier_mode, integrate_lorenz96, read_timeseries, regression_msm,
    simulate_ou, write_timeseries, Lorenz96Config, MultiSeries, SeriesFormat,
};
use scar_core::{Complex64, Series};

fn perturbed_state(j: usize, forcing: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..j)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            forcing + z
        })
        .collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn trajectory() -> &'static MultiSeries {
    static T: OnceLock<MultiSeries> = OnceLock::new();
    T.get_or_init(|| integrate_lorenz96(&Lorenz96Config { duration: 400.0, ..Default::default() }).unwrap())
}

#[test]
fn rk4_error_drops_sixteenfold_per_halving() {
    let x0 = perturbed_state(40, 6.0, 1);
    let t = 0.5;
    let run = |h: f64| {
        let mut x = x0.clone();
        advance(&mut x, 6.0, h, (t / h).round() as usize, 0.0).unwrap();
        x
    };
    let (a, b, c) = (run(0.02), run(0.01), run(0.005));
    let ratio = distance(&a, &b) / distance(&b, &c);
    assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
}

#[test]
fn unforced_energy_decays_exactly() {
    // advection conserves Σx², so with F = 0 only the damping acts: Σx²(t) = Σx²(0) e^{−2t}
    let mut x = perturbed_state(16, 0.0, 4);
    let e0: f64 = x.iter().map(|v| v * v).sum();
    advance(&mut x, 0.0, 1e-3, 1000, 0.0).unwrap();
    let e1: f64 = x.iter().map(|v| v * v).sum();
    assert!((e1 / e0 - (-2.0f64).exp()).abs() < 1e-9, "{}", e1 / e0);
}

#[test]
fn weakly_chaotic_trajectory_stays_bounded() {
    let s = trajectory();
    assert_eq!(s.len(), 400 * 64 + 1);
    assert!(s.max_abs() < 20.0, "max |x| = {}", s.max_abs());
}

#[test]
fn mode8_remembers_longer_than_mode1() {
    let s = trajectory();
    let first_below_half = |k: usize| {
        let st = equilibrium_stats(&fourier_mode(s, k).unwrap(), Some(20.0)).unwrap();
        st.acf.iter().position(|a| a.norm() < 0.5).map(|m| m as f64 * st.dt)
    };
    let t1 = first_below_half(1).expect("mode 1 decorrelates");
    let t8 = first_below_half(8).unwrap_or(f64::INFINITY);
    assert!(t8 > t1, "mode 8 {t8} vs mode 1 {t1}");
}

#[test]
fn mode8_carries_the_most_energy() {
    let s = trajectory();
    let energy = |k| equilibrium_stats(&fourier_mode(s, k).unwrap(), Some(0.0)).unwrap().energy;
    let e8 = energy(8);
    for k in (1..=20).filter(|k| *k != 8 && (*k < 6 || *k > 9)) {
        assert!(energy(k) < e8, "mode {k} beats mode 8");
    }
}

#[test]
fn regression_and_correlation_time_agree_on_ou() {
    let lam = Complex64::new(-2.0, 1.5);
    let s = simulate_ou(lam, 1.0, 0.02, 200_000, 17).unwrap();
    let (l1, s1) = regression_msm(&s).unwrap();
    let (l2, s2) = equilibrium_stats(&s, None).unwrap().msm().unwrap();
    assert!((l1 - lam).norm() < 0.1 * lam.norm());
    assert!((l2 - lam).norm() < 0.1 * lam.norm(), "{l2}");
    assert!((s1 - 1.0).abs() < 0.1 && (s2 - 1.0).abs() < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_is_linear(
        x in prop::collection::vec(-10.0..10.0f64, 40),
        y in prop::collection::vec(-10.0..10.0f64, 40),
        a in -3.0..3.0f64, b in -3.0..3.0f64, k in 0usize..=20,
    ) {
        let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let lhs = dft_coefficient(&z, k);
        let rhs = dft_coefficient(&x, k) * a + dft_coefficient(&y, k) * b;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn cyclic_shift_rotates_phase(x in prop::collection::vec(-10.0..10.0f64, 12), k in 0usize..=6) {
        let mut shifted = x.clone();
        shifted.rotate_right(1);
        let phase = Complex64::from_polar(1.0, -std::f64::consts::TAU * k as f64 / 12.0);
        prop_assert!((dft_coefficient(&shifted, k) - dft_coefficient(&x, k) * phase).norm() < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(
        v in prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 2..50),
        dt in 1e-3..10.0f64, t0 in -100.0..100.0f64,
    ) {
        let s = Series::new(v.iter().map(|(r, i)| Complex64::new(*r, *i)).collect(), dt, t0).unwrap();
        let mut buf = Vec::new();
        write_timeseries(&s, &mut buf).unwrap();
        let back = read_timeseries(&buf[..], SeriesFormat::Complex).unwrap();
        prop_assert_eq!(back.values(), s.values());
        prop_assert!((back.dt() - dt).abs() <= 1e-9 * dt.max(1.0));
    }
}
