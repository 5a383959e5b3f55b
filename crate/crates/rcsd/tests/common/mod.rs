//! Independent oracles shared by the integration tests.
//!
//! Everything here deliberately avoids the production code paths: residue
//! calculus instead of adaptive quadrature, brute-force sums instead of
//! transformed integrals, naive loops instead of BLAS calls.

#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rcsd::specden::LorentzianPeak;

/// Upper-half-plane poles of J(ω) = λ²γω/((ω²−ν²)² + γ²ω²).
///
/// The denominator factors as p(ω)·p̄(ω) with p(ω) = ω² − iγω − ν²; the
/// roots of p sit in the upper half plane at ±w₀ + iγ/2, w₀ = √(ν²−γ²/4).
pub fn uhp_poles(peak: &LorentzianPeak) -> (C64, C64) {
    let w0 = (peak.nu() * peak.nu() - 0.25 * peak.gamma() * peak.gamma()).sqrt();
    (
        C64::new(w0, 0.5 * peak.gamma()),
        C64::new(-w0, 0.5 * peak.gamma()),
    )
}

/// d/dω of the full denominator D = (ω²−ν²)² + γ²ω², evaluated at a root
/// of p, where D'(r) = p'(r)·p̄(r).
fn denominator_derivative_at_pole(peak: &LorentzianPeak, r: C64) -> C64 {
    let gamma = C64::new(0.0, peak.gamma());
    let nu2 = C64::new(peak.nu() * peak.nu(), 0.0);
    let p_prime = 2.0 * r - gamma;
    let p_bar = r * r + gamma * r - nu2;
    p_prime * p_bar
}

/// Closed-form moments by residues:
/// ∫₀^∞ ωJ dω = πi λ²γ Σ r²/D'(r), ∫₀^∞ J/ω dω = πi λ²γ Σ 1/D'(r).
pub fn moments_residue(peak: &LorentzianPeak) -> (f64, f64) {
    let c = peak.lambda() * peak.lambda() * peak.gamma();
    let (r1, r2) = uhp_poles(peak);
    let mut first = C64::new(0.0, 0.0);
    let mut inverse = C64::new(0.0, 0.0);
    for r in [r1, r2] {
        let dp = denominator_derivative_at_pole(peak, r);
        first += r * r / dp;
        inverse += 1.0 / dp;
    }
    let pi_i = C64::new(0.0, std::f64::consts::PI);
    let first = pi_i * c * first;
    let inverse = pi_i * c * inverse;
    assert!(first.im.abs() < 1e-14 * first.re.abs().max(1e-30));
    assert!(inverse.im.abs() < 1e-14 * inverse.re.abs().max(1e-30));
    (first.re, inverse.re)
}

/// Closed-form Cauchy principal value by residues:
/// P∫_{-∞}^{∞} J(ω′)/(ω′−ω) dω′ = Re[ 2πi Σ_r Res + iπ J(ω) ].
pub fn cauchy_residue(peak: &LorentzianPeak, omega: f64) -> f64 {
    let c = peak.lambda() * peak.lambda() * peak.gamma();
    let (r1, r2) = uhp_poles(peak);
    let mut sum = C64::new(0.0, 0.0);
    for r in [r1, r2] {
        let dp = denominator_derivative_at_pole(peak, r);
        sum += c * r / (dp * (r - C64::new(omega, 0.0)));
    }
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    let val = two_pi_i * sum + C64::new(0.0, std::f64::consts::PI * peak.evaluate(omega));
    assert!(
        val.im.abs() < 1e-10 * val.re.abs().max(1e-12),
        "residue PV should be real, got {val}"
    );
    val.re
}

/// Brute-force symmetric-grid principal value: midpoint pairs ω ± (k+½)h
/// cancel the pole exactly.
pub fn cauchy_brute_force(peak: &LorentzianPeak, omega: f64, step: f64, window: f64) -> f64 {
    let n = (window / step) as usize;
    let mut acc = 0.0;
    for k in 0..n {
        let delta = (k as f64 + 0.5) * step;
        acc += (peak.evaluate(omega + delta) - peak.evaluate(omega - delta)) / delta;
    }
    acc * step
}

/// High-resolution trapezoidal bath correlation on ω ∈ (0, 50], with the
/// analytic ω → 0 limit closing the first panel.
pub fn correlation_trapezoid(
    peaks: &[LorentzianPeak],
    beta: f64,
    tau: f64,
    points: usize,
) -> C64 {
    let upper = 50.0;
    let h = upper / points as f64;
    let eval = |omega: f64| -> C64 {
        let j: f64 = peaks.iter().map(|p| p.evaluate(omega)).sum();
        let n = 1.0 / (beta * omega).exp_m1();
        let phase = C64::new(0.0, omega * tau).exp();
        j * (n * phase + (1.0 + n) * phase.conj())
    };
    // J(ω)(1+2n_B) → 2/β · Σ λ²γ/ν⁴ as ω → 0
    let slope: f64 = peaks
        .iter()
        .map(|p| p.lambda() * p.lambda() * p.gamma() / p.nu().powi(4))
        .sum();
    let f0 = C64::new(2.0 * slope / beta, 0.0);
    let mut acc = 0.5 * (f0 + eval(upper));
    for k in 1..points {
        acc += eval(k as f64 * h);
    }
    acc * h
}

/// O(P²) discrete Fourier transform, X_k = Σ_p v_p e^{-2πikp/P}.
pub fn naive_dft(signal: &[f64]) -> Vec<C64> {
    let p_total = signal.len();
    (0..p_total)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (p, v) in signal.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * (k * p) as f64 / p_total as f64;
                acc += v * C64::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect()
}

/// Naive partial trace over everything but the first (qubit) factor.
pub fn naive_partial_trace_qubit(rho: &Array2<C64>, rest_dim: usize) -> Array2<C64> {
    let mut out = Array2::zeros((2, 2));
    for q in 0..2 {
        for qp in 0..2 {
            for r in 0..rest_dim {
                out[[q, qp]] += rho[[q * rest_dim + r, qp * rest_dim + r]];
            }
        }
    }
    out
}

/// Cyclic Jacobi eigensolver for Hermitian matrices: an eigensolver route
/// independent of LAPACK. Returns ascending eigenvalues.
pub fn jacobi_eigenvalues(matrix: &Array2<C64>, sweeps: usize) -> Vec<f64> {
    let n = matrix.nrows();
    let mut a = matrix.clone();
    for _ in 0..sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[[p, q]].norm_sqr();
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.norm() < 1e-300 {
                    continue;
                }
                // unitary 2x2 rotation zeroing a[p,q]
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let cp = C64::new(c, 0.0);
                let sp = phase * s;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * cp - akq * sp.conj();
                    a[[k, q]] = akp * sp + akq * cp;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * cp - aqk * sp;
                    a[[q, k]] = apk * sp.conj() + aqk * cp;
                }
            }
        }
    }
    let mut vals: Vec<f64> = a.diag().iter().map(|z| z.re).collect();
    vals.sort_by(f64::total_cmp);
    vals
}
