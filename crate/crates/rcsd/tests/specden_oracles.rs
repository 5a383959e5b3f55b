//! Quadrature operations checked against independent closed-form routes.

mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng;
use rcsd::specden::{
    bath_correlation, cauchy_transform, moment_integrals, BathSpec, LorentzianPeak,
    QuadratureConfig, StructuredSD, TailPolicy,
};

fn peak(lambda: f64, gamma: f64, nu: f64) -> LorentzianPeak {
    LorentzianPeak::new(lambda, gamma, nu).unwrap()
}

#[test]
fn moments_match_residue_calculus() {
    let cfg = QuadratureConfig::default();
    for (l, g, n) in [
        (0.25, 0.25, 1.0),
        (0.1, 0.15, 2.0),
        (0.17, 0.22, 0.54),
        (0.25, 0.15, 0.6),
    ] {
        let p = peak(l, g, n);
        let m = moment_integrals(&p, &cfg).unwrap();
        let (first, inverse) = common::moments_residue(&p);
        assert_abs_diff_eq!(m.first, first, epsilon = 1e-10 * first);
        assert_abs_diff_eq!(m.inverse, inverse, epsilon = 1e-10 * inverse);
    }
}

#[test]
fn moments_match_explicit_algebra() {
    // the residues reduce to first = πλ²/2 and inverse = πλ²/(2ν²);
    // both are exactly γ-independent for the underdamped Lorentzian
    let cfg = QuadratureConfig::default();
    let pi = std::f64::consts::PI;
    for (l, g, n) in [(0.25f64, 0.25f64, 1.0f64), (0.25, 0.15, 1.0), (0.12, 0.2, 1.7)] {
        let m = moment_integrals(&peak(l, g, n), &cfg).unwrap();
        let expect_first = 0.5 * pi * l * l;
        let expect_inverse = 0.5 * pi * l * l / (n * n);
        assert_abs_diff_eq!(m.first, expect_first, epsilon = 1e-11);
        assert_abs_diff_eq!(m.inverse, expect_inverse, epsilon = 1e-11);
    }
}

#[test]
fn inverse_moment_limit_preserved_as_width_shrinks() {
    let cfg = QuadratureConfig::default();
    let expect = 0.5 * std::f64::consts::PI * 0.25 * 0.25 / 1.0;
    for g in [0.1, 0.01, 0.001] {
        let m = moment_integrals(&peak(0.25, g, 1.0), &cfg).unwrap();
        assert_abs_diff_eq!(m.inverse, expect, epsilon = 1e-9);
    }
}

#[test]
fn sd_moments_are_additive_over_peaks() {
    let cfg = QuadratureConfig::default();
    let p1 = peak(0.2, 0.18, 0.7);
    let p2 = peak(0.11, 0.24, 1.6);
    let sd = StructuredSD::new(vec![p1, p2]).unwrap();
    let split = cfg.tail.omega_max_sd(&sd);
    let whole = rcsd::quad::adaptive_semi_infinite(
        |w: f64| w * sd.evaluate(w),
        0.0,
        split,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdiv,
    )
    .unwrap();
    let parts = moment_integrals(&p1, &cfg).unwrap().first + moment_integrals(&p2, &cfg).unwrap().first;
    assert_abs_diff_eq!(whole.value, parts, epsilon = 1e-10);
}

#[test]
fn cauchy_transform_matches_residue_closed_form() {
    let cfg = QuadratureConfig::default();
    for (l, g, n, w) in [
        (0.25, 0.25, 1.0, 1.0),
        (0.25, 0.25, 1.0, 0.3),
        (0.25, 0.25, 1.0, 2.7),
        (0.1, 0.15, 2.0, 1.9),
        (0.2, 0.2, 0.6, 0.05),
    ] {
        let p = peak(l, g, n);
        let got = cauchy_transform(&p, w, &cfg).unwrap().value;
        let expect = common::cauchy_residue(&p, w);
        assert_abs_diff_eq!(got, expect, epsilon = 1e-9 * expect.abs().max(1e-3));
    }
}

#[test]
fn cauchy_transform_matches_brute_force_grid() {
    // ten seeded (peak, ω) pairs against the symmetric-grid PV sum
    let cfg = QuadratureConfig::default();
    let mut rng = rcsd::seeds::stream(42, "pv-brute-force", 0);
    for _ in 0..10 {
        let p = peak(
            rng.random_range(0.1..0.25),
            rng.random_range(0.15..0.25),
            rng.random_range(0.54..2.0),
        );
        let w = rng.random_range(0.05..3.0);
        let got = cauchy_transform(&p, w, &cfg).unwrap().value;
        let brute = common::cauchy_brute_force(&p, w, 1e-4, 200.0);
        assert_abs_diff_eq!(got, brute, epsilon = 1e-6 * brute.abs().max(1e-6));
    }
}

#[test]
fn correlation_fixture_matches_trapezoid_oracle() {
    // compare on the same truncated domain: the production cutoff policy
    // is pinned to the oracle's ω ∈ (0, 50]
    let cfg = QuadratureConfig {
        tail: TailPolicy::Fixed { omega_max: 50.0 },
        ..QuadratureConfig::default()
    };
    let p = peak(0.25, 0.25, 1.0);
    let sd = StructuredSD::new(vec![p]).unwrap();
    let bath = BathSpec::new(2.0).unwrap();
    let got = bath_correlation(&sd, &bath, 1.0, &cfg).unwrap().value;
    let oracle = common::correlation_trapezoid(&[p], 2.0, 1.0, 1_000_000);
    assert_abs_diff_eq!(got.re, oracle.re, epsilon = 1e-8);
    assert_abs_diff_eq!(got.im, oracle.im, epsilon = 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluate_is_odd_everywhere(
        l in 0.1f64..0.25,
        g in 0.15f64..0.25,
        n in 0.54f64..2.0,
        w in -30.0f64..30.0,
    ) {
        let p = peak(l, g, n);
        prop_assert_eq!(p.evaluate(-w), -p.evaluate(w));
    }

    #[test]
    fn evaluate_nonnegative_for_nonnegative_frequency(
        l in 0.1f64..0.25,
        g in 0.15f64..0.25,
        n in 0.54f64..2.0,
        w in 0.0f64..40.0,
    ) {
        let p = peak(l, g, n);
        prop_assert!(p.evaluate(w) >= 0.0);
    }
}

#[test]
fn correlation_conjugate_symmetry_at_random_times() {
    let cfg = QuadratureConfig::default();
    let sd = StructuredSD::new(vec![peak(0.2, 0.2, 1.1), peak(0.13, 0.17, 0.8)]).unwrap();
    let bath = BathSpec::new(2.0).unwrap();
    let mut rng = rcsd::seeds::stream(42, "corr-symmetry", 0);
    for _ in 0..10 {
        let tau: f64 = rng.random_range(0.01..8.0);
        let c = bath_correlation(&sd, &bath, tau, &cfg).unwrap();
        let cm = bath_correlation(&sd, &bath, -tau, &cfg).unwrap();
        assert_abs_diff_eq!(cm.value.re, c.value.re, epsilon = 1e-10);
        assert_abs_diff_eq!(cm.value.im, -c.value.im, epsilon = 1e-10);
    }
}
