//! Truncation-dimension benchmarking against the exact dephasing solution.
//!
//! For a given peak the pure-dephasing model is simulated through the RC
//! mapping at growing ladder dimensions until the reduced coherence
//! magnitude tracks the exact solution within δ across the whole sampling
//! grid. Convergence is monotone in practice, and the resulting minimal
//! dimensions are what the shipped table stores.

use crate::error::{Error, Result};
use crate::rcmap::{rc_parameters, MappedSd};
use crate::specden::{BathSpec, LorentzianPeak, QuadratureConfig, StructuredSD};

use super::generator::Generator;
use super::integrate::{evolve, IntegratorKind};
use super::rates::RcRates;
use super::{
    decoherence_function, plus_state, qubit_coherence, sample_grid, CouplingOp, HilbertSpec,
};

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    /// Smallest dimension meeting the tolerance.
    pub minimal_dim: usize,
    /// (M, max |‖ρ₀₁‖ deviation|) for every dimension tried, in order.
    pub deviations: Vec<(usize, f64)>,
}

/// Smallest RC dimension whose simulated |ρ₀₁(t)| stays within `delta` of
/// the exact dephasing solution over the 400-point grid, starting from
/// |+⟩⟨+| ⊗ thermal. Dimensions are tried from 2 up to `cap`.
pub fn benchmark_rc_dims(
    peak: &LorentzianPeak,
    bath: &BathSpec,
    omega0: f64,
    delta: f64,
    cap: usize,
    cfg: &QuadratureConfig,
) -> Result<BenchmarkOutcome> {
    if delta <= 0.0 {
        return Err(Error::Domain("convergence threshold must be positive".into()));
    }
    if cap < 2 {
        return Err(Error::Domain("dimension cap must be at least 2".into()));
    }
    let times = sample_grid();

    // exact |ρ₀₁| on the grid; ρ₀₁(0) = 1/2 for |+⟩⟨+|
    let sd = StructuredSD::new(vec![*peak])?;
    let exact: Vec<f64> = times
        .iter()
        .map(|&t| decoherence_function(&sd, bath, t, cfg).map(|g| 0.5 * (-g).exp()))
        .collect::<Result<_>>()?;

    // rates are dimension independent; build them once
    let rc0 = rc_parameters(peak, cfg)?;
    let rates = vec![RcRates::new(MappedSd::new(&rc0, cfg)?, bath)];

    let mut deviations = Vec::new();
    for m in 2..=cap {
        let rc = rc0.with_dimension(m)?;
        let spec = HilbertSpec::new(omega0, CouplingOp::SigmaZ, vec![rc])?;
        let gen = Generator::with_rates(&spec, bath, &rates, cfg)?;
        let rho0 = spec.initial_product_state(&plus_state(), bath.beta())?;
        let rc_space = spec.rc_space_dim();
        let (coherences, _) = evolve(
            &gen,
            &rho0,
            &times,
            &IntegratorKind::default(),
            |_, _, rho| qubit_coherence(rho, rc_space).norm(),
        )?;
        let dev = coherences
            .iter()
            .zip(&exact)
            .map(|(sim, ex)| (sim - ex).abs())
            .fold(0.0f64, f64::max);
        deviations.push((m, dev));
        if dev <= delta {
            return Ok(BenchmarkOutcome { minimal_dim: m, deviations });
        }
    }
    Err(Error::BenchmarkCap { delta, deviations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_tolerance_returns_minimum_dimension() {
        let cfg = QuadratureConfig::default();
        let peak = LorentzianPeak::new(0.25, 0.25, 1.0).unwrap();
        let bath = BathSpec::new(2.0).unwrap();
        let out = benchmark_rc_dims(&peak, &bath, 1.0, f64::INFINITY, 12, &cfg).unwrap();
        assert_eq!(out.minimal_dim, 2);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        let cfg = QuadratureConfig::default();
        let peak = LorentzianPeak::new(0.25, 0.25, 1.0).unwrap();
        let bath = BathSpec::new(2.0).unwrap();
        assert!(benchmark_rc_dims(&peak, &bath, 1.0, 0.0, 12, &cfg).is_err());
        assert!(benchmark_rc_dims(&peak, &bath, 1.0, 0.01, 1, &cfg).is_err());
    }
}
