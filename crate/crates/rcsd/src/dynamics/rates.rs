//! Thermal rates of the residual baths and the eigenbasis-weighted rate
//! operators entering the master equation.

use ndarray::Array1;

use crate::error::Result;
use crate::linalg::{dagger, eigh_hermitian, CMat};
use crate::rcmap::MappedSd;
use crate::specden::{BathSpec, QuadratureConfig};

use super::HilbertSpec;

/// Bohr frequencies closer to zero than this take the ω = 0 limit of the
/// rates; eigenvalue differences carry no gap regularisation.
const DEGENERACY_CUTOFF: f64 = 1e-10;

/// Γ± for one reaction coordinate's residual bath.
#[derive(Debug, Clone)]
pub struct RcRates {
    mapped: MappedSd,
    beta: f64,
}

impl RcRates {
    pub fn new(mapped: MappedSd, bath: &BathSpec) -> Self {
        RcRates { mapped, beta: bath.beta() }
    }

    pub fn mapped(&self) -> &MappedSd {
        &self.mapped
    }

    /// Γ⁺(ω): π J_rc(ω) n_B(ω) for ω > 0, the κ/β limit at ω = 0, and
    /// π J_rc(|ω|)(1 + n_B(|ω|)) for ω < 0.
    pub fn gamma_plus(&self, omega: f64) -> f64 {
        let pi = std::f64::consts::PI;
        if omega.abs() < DEGENERACY_CUTOFF {
            return pi * self.mapped.low_frequency_slope() / self.beta;
        }
        if omega > 0.0 {
            let n = 1.0 / (self.beta * omega).exp_m1();
            pi * self.mapped.evaluate(omega) * n
        } else {
            let w = -omega;
            let n = 1.0 / (self.beta * w).exp_m1();
            pi * self.mapped.evaluate(w) * (1.0 + n)
        }
    }

    /// Γ⁻(ω): π J_rc(ω)(1 + n_B(ω)) for ω > 0, the same κ/β limit at
    /// ω = 0, and π J_rc(|ω|) n_B(|ω|) for ω < 0.
    pub fn gamma_minus(&self, omega: f64) -> f64 {
        let pi = std::f64::consts::PI;
        if omega.abs() < DEGENERACY_CUTOFF {
            return pi * self.mapped.low_frequency_slope() / self.beta;
        }
        if omega > 0.0 {
            let n = 1.0 / (self.beta * omega).exp_m1();
            pi * self.mapped.evaluate(omega) * (1.0 + n)
        } else {
            let w = -omega;
            let n = 1.0 / (self.beta * w).exp_m1();
            pi * self.mapped.evaluate(w) * n
        }
    }
}

/// Per-RC pair (χᵢ, ξᵢ) with (χᵢ)_{jk} = (Aᵢ)_{jk} Γ⁺(ν_{jk}) and
/// (ξᵢ)_{jk} = (Aᵢ)_{jk} Γ⁻(ν_{jk}) in the eigenbasis of H, rotated back
/// to the product basis. The imaginary (Lamb-shift) parts of the
/// half-Fourier transforms are dropped.
#[derive(Debug, Clone)]
pub struct RateOperators {
    pub chi: Vec<CMat>,
    pub xi: Vec<CMat>,
    /// Eigenvalues of the enlarged Hamiltonian, ascending.
    pub eigenvalues: Array1<f64>,
    /// Eigenvectors as columns; the rotation used for the weighting.
    pub eigenvectors: CMat,
}

pub fn build_rate_operators(
    spec: &HilbertSpec,
    bath: &BathSpec,
    rates: &[RcRates],
    cfg: &QuadratureConfig,
) -> Result<RateOperators> {
    let _ = (bath, cfg);
    let h = spec.build_hamiltonian()?;
    let (psi, v) = eigh_hermitian(h.matrix())?;
    let v_dag = dagger(&v);

    let d = spec.total_dim();
    let mut chi = Vec::with_capacity(spec.rcs().len());
    let mut xi = Vec::with_capacity(spec.rcs().len());
    for (i, rc_rates) in rates.iter().enumerate() {
        let a = spec.rc_position_operator(i);
        let a_eig = v_dag.dot(&a).dot(&v);
        let mut chi_eig = a_eig.clone();
        let mut xi_eig = a_eig;
        for j in 0..d {
            for k in 0..d {
                let nu = psi[j] - psi[k];
                chi_eig[[j, k]] *= rc_rates.gamma_plus(nu);
                xi_eig[[j, k]] *= rc_rates.gamma_minus(nu);
            }
        }
        chi.push(v.dot(&chi_eig).dot(&v_dag));
        xi.push(v.dot(&xi_eig).dot(&v_dag));
    }
    Ok(RateOperators { chi, xi, eigenvalues: psi, eigenvectors: v })
}
