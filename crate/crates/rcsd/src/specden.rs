//! Structured spectral densities built from Lorentzian peaks, and the
//! frequency-domain integrals the rest of the pipeline consumes: moments,
//! the thermal bath correlation function and Cauchy principal values.
//!
//! Units: ħ = k_B = 1 and all energies are measured in the qubit splitting
//! ω₀ = 1; times are in 1/ω₀.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadValue};

/// One underdamped Lorentzian component
/// J(ω) = λ²γω / ((ω² − ν²)² + γ²ω²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianPeak {
    lambda: f64,
    gamma: f64,
    nu: f64,
}

impl LorentzianPeak {
    /// Requires λ, γ, ν > 0 and 4ν² > γ² (both poles off the real axis).
    pub fn new(lambda: f64, gamma: f64, nu: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("coupling must be positive, got {lambda}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("width must be positive, got {gamma}")));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!("center must be positive, got {nu}")));
        }
        if 4.0 * nu * nu <= gamma * gamma {
            return Err(Error::Domain(format!(
                "peak must be underdamped: need 4ν² > γ², got ν = {nu}, γ = {gamma}"
            )));
        }
        Ok(LorentzianPeak { lambda, gamma, nu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// J(ω); odd in ω by construction.
    pub fn evaluate(&self, omega: f64) -> f64 {
        let d2 = omega * omega - self.nu * self.nu;
        let den = d2 * d2 + self.gamma * self.gamma * omega * omega;
        self.lambda * self.lambda * self.gamma * omega / den
    }

    /// dJ/dω.
    pub fn derivative(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        let d2 = w2 - self.nu * self.nu;
        let den = d2 * d2 + self.gamma * self.gamma * w2;
        let dden = 4.0 * omega * d2 + 2.0 * self.gamma * self.gamma * omega;
        self.lambda * self.lambda * self.gamma * (den - omega * dden) / (den * den)
    }
}

/// A sum of Lorentzian peaks. The representation supports any count; the
/// sampled datasets use one to three.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredSD {
    peaks: Vec<LorentzianPeak>,
}

impl StructuredSD {
    pub fn new(peaks: Vec<LorentzianPeak>) -> Result<Self> {
        if peaks.is_empty() {
            return Err(Error::Domain("spectral density needs at least one peak".into()));
        }
        Ok(StructuredSD { peaks })
    }

    pub fn peaks(&self) -> &[LorentzianPeak] {
        &self.peaks
    }

    pub fn num_peaks(&self) -> usize {
        self.peaks.len()
    }

    /// J(ω) = Σᵢ Jᵢ(ω), extended oddly over the whole real line.
    pub fn evaluate(&self, omega: f64) -> f64 {
        self.peaks.iter().map(|p| p.evaluate(omega)).sum()
    }

    /// Plain-text record `N; λ1,γ1,ν1; λ2,γ2,ν2; ...` with round-trip
    /// exact floating-point formatting.
    pub fn to_record(&self) -> String {
        let mut s = format!("{}", self.peaks.len());
        for p in &self.peaks {
            s.push_str(&format!("; {},{},{}", p.lambda, p.gamma, p.nu));
        }
        s
    }

    pub fn from_record(record: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let mut parts = record.split(';').map(str::trim);
        let n: usize = parts
            .next()
            .ok_or_else(|| bad("empty record".into()))?
            .parse()
            .map_err(|e| bad(format!("bad peak count: {e}")))?;
        let mut peaks = Vec::with_capacity(n);
        for part in parts {
            let nums: Vec<&str> = part.split(',').map(str::trim).collect();
            if nums.len() != 3 {
                return Err(bad(format!("expected λ,γ,ν triple, got `{part}`")));
            }
            let read = |s: &str| -> Result<f64> {
                s.parse().map_err(|e| bad(format!("bad number `{s}`: {e}")))
            };
            peaks.push(LorentzianPeak::new(read(nums[0])?, read(nums[1])?, read(nums[2])?)?);
        }
        if peaks.len() != n {
            return Err(bad(format!("record declares {n} peaks but carries {}", peaks.len())));
        }
        StructuredSD::new(peaks)
    }
}

/// Rule mapping a peak to the frequency where adaptive quadrature hands
/// over to the 1/ω-transformed tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailPolicy {
    /// ω_max = ν + (multiplier)·γ; the default multiplier is 50.
    NuPlusWidths { multiplier: f64 },
    /// Fixed split, clamped from below to ν + 50γ.
    Fixed { omega_max: f64 },
}

impl TailPolicy {
    pub fn omega_max(&self, peak: &LorentzianPeak) -> f64 {
        let floor = peak.nu + 50.0 * peak.gamma;
        match self {
            TailPolicy::NuPlusWidths { multiplier } => {
                (peak.nu + multiplier * peak.gamma).max(floor)
            }
            TailPolicy::Fixed { omega_max } => omega_max.max(floor),
        }
    }

    pub fn omega_max_sd(&self, sd: &StructuredSD) -> f64 {
        sd.peaks
            .iter()
            .map(|p| self.omega_max(p))
            .fold(0.0, f64::max)
    }
}

/// Tolerances and budget for every adaptive quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdiv: usize,
    pub tail: TailPolicy,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdiv: 2000,
            tail: TailPolicy::NuPlusWidths { multiplier: 50.0 },
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol <= 0.0 || self.abs_tol <= 0.0 {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdiv == 0 {
            return Err(Error::Config("max subdivisions must be positive".into()));
        }
        Ok(())
    }
}

/// Thermal environment, characterised by its inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    beta: f64,
}

impl BathSpec {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("inverse temperature must be positive, got {beta}")));
        }
        Ok(BathSpec { beta })
    }

    /// T = ω₀/2, the temperature used throughout the sampled datasets.
    pub fn half_omega0_temperature() -> Self {
        BathSpec { beta: 2.0 }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Bose–Einstein occupation 1/(e^{βω} − 1). ω = 0 is a domain error;
/// rate evaluations own that limit explicitly.
pub fn bose_occupation(omega: f64, beta: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::Domain(
            "Bose occupation diverges at ω = 0; use the ω → 0 limit of the rate".into(),
        ));
    }
    Ok(1.0 / (beta * omega).exp_m1())
}

/// Thermal bath correlation function
/// C(τ) = ∫₀^∞ dω J(ω) [n_B(ω) e^{iωτ} + (1 + n_B(ω)) e^{−iωτ}].
///
/// The quadrature runs on [0, ω_max] from the tail policy; the truncated
/// oscillatory tail is bounded analytically (J = O(ω⁻³)) and folded into
/// the returned error estimate.
pub fn bath_correlation(
    sd: &StructuredSD,
    bath: &BathSpec,
    tau: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadValue<Complex64>> {
    cfg.validate()?;
    let beta = bath.beta();
    let w_max = cfg.tail.omega_max_sd(sd);

    let integrand = |omega: f64| -> Complex64 {
        let j = sd.evaluate(omega);
        let n = 1.0 / (beta * omega).exp_m1();
        let phase = Complex64::new(0.0, omega * tau).exp();
        j * (n * phase + (1.0 + n) * phase.conj())
    };
    let mut out = quad::adaptive(integrand, 0.0, w_max, cfg.rel_tol, cfg.abs_tol, cfg.max_subdiv)?;

    // |∫_W^∞| ≤ Σᵢ λᵢ²γᵢ/(2W²) · (1 + 2 n_B(W)), sharpened by one
    // integration by parts when the phase turns over fast enough.
    let n_w = 1.0 / (beta * w_max).exp_m1();
    let flat: f64 = sd
        .peaks
        .iter()
        .map(|p| p.lambda * p.lambda * p.gamma / (2.0 * w_max * w_max))
        .sum::<f64>()
        * (1.0 + 2.0 * n_w);
    let tail_bound = if tau.abs() * w_max > 1.0 {
        flat.min(sd.evaluate(w_max) * (1.0 + 2.0 * n_w) * 2.0 / tau.abs())
    } else {
        flat
    };
    out.error += tail_bound;
    Ok(out)
}

/// The two moments feeding the reaction-coordinate parameters.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    /// ∫₀^∞ ω J(ω) dω
    pub first: f64,
    /// ∫₀^∞ J(ω)/ω dω
    pub inverse: f64,
    pub error: f64,
}

/// First and inverse moments of a single peak, with the tails integrated
/// exactly through the 1/ω map.
pub fn moment_integrals(peak: &LorentzianPeak, cfg: &QuadratureConfig) -> Result<Moments> {
    cfg.validate()?;
    let split = cfg.tail.omega_max(peak);
    let first = quad::adaptive_semi_infinite(
        |w: f64| w * peak.evaluate(w),
        0.0,
        split,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdiv,
    )?;
    let inverse = quad::adaptive_semi_infinite(
        |w: f64| {
            if w == 0.0 {
                // J(ω)/ω → λ²γ/ν⁴ as ω → 0
                peak.lambda * peak.lambda * peak.gamma / peak.nu.powi(4)
            } else {
                peak.evaluate(w) / w
            }
        },
        0.0,
        split,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdiv,
    )?;
    if first.value <= 0.0 || inverse.value <= 0.0 {
        return Err(Error::Domain("spectral moments must be strictly positive".into()));
    }
    Ok(Moments { first: first.value, inverse: inverse.value, error: first.error + inverse.error })
}

/// Cauchy principal value P∫_{−∞}^{∞} J(ω′)/(ω′ − ω) dω′ for ω > 0,
/// using the odd extension of J.
///
/// The singular window [ω − a, ω + a] with a = min(ω, 5γ) integrates the
/// subtracted form [J(ω′) − J(ω)]/(ω′ − ω), whose singularity is removable;
/// the rest of the line splits into plain adaptive pieces with exact
/// 1/ω-mapped tails. The negative half-line folds onto [0, ∞) as
/// ∫₀^∞ J(ω′)/(ω′ + ω) dω′ because J is odd.
pub fn cauchy_transform(peak: &LorentzianPeak, omega: f64, cfg: &QuadratureConfig) -> Result<QuadValue<f64>> {
    cfg.validate()?;
    if omega <= 0.0 {
        return Err(Error::Domain(format!("cauchy_transform requires ω > 0, got {omega}")));
    }
    let a = omega.min(5.0 * peak.gamma);
    let guard = 1e-7 * omega.max(1.0);
    let j_at = peak.evaluate(omega);
    let dj_at = peak.derivative(omega);

    let window = quad::adaptive(
        |w: f64| {
            let d = w - omega;
            if d.abs() < guard {
                dj_at
            } else {
                (peak.evaluate(w) - j_at) / d
            }
        },
        omega - a,
        omega + a,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdiv,
    )?;

    let left = if omega - a > 0.0 {
        quad::adaptive(
            |w: f64| peak.evaluate(w) / (w - omega),
            0.0,
            omega - a,
            cfg.rel_tol,
            cfg.abs_tol,
            cfg.max_subdiv,
        )?
    } else {
        QuadValue { value: 0.0, error: 0.0, evals: 0 }
    };

    let w_max = cfg.tail.omega_max(peak).max(1.5 * (omega + a));
    let right = quad::adaptive_semi_infinite(
        |w: f64| peak.evaluate(w) / (w - omega),
        omega + a,
        w_max,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdiv,
    )?;

    let mirrored = quad::adaptive_semi_infinite(
        |w: f64| peak.evaluate(w) / (w + omega),
        0.0,
        w_max,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdiv,
    )?;

    Ok(QuadValue {
        value: window.value + left.value + right.value + mirrored.value,
        error: window.error + left.error + right.error + mirrored.error,
        evals: window.evals + left.evals + right.evals + mirrored.evals,
    })
}
