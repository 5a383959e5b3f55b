//! The master-equation generator
//!
//!   dρ/dt = -i[H, ρ] - Σᵢ ( [Aᵢ, χᵢ ρ] + [ρ ξᵢ, Aᵢ] )
//!
//! applied without forming the superoperator. H and the Aᵢ act through
//! their sparse structure in the product basis; only χᵢρ needs a dense
//! multiply. Because the Γ rates are real and Aᵢ is Hermitian, ξᵢ = χᵢ†,
//! which turns the second commutator into the Hermitian conjugate of the
//! first; the generator verifies that identity at build time and exploits
//! it in the hot path.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMat};
use crate::rcmap::MappedSd;
use crate::specden::{BathSpec, QuadratureConfig};

use super::rates::{build_rate_operators, RcRates};
use super::{CouplingOp, HilbertSpec};

/// Sparse operator as (row, col, value) triples; every operator here has
/// O(d) entries.
#[derive(Debug, Clone)]
struct Coo {
    entries: Vec<(u32, u32, f64)>,
}

impl Coo {
    /// out += coef · op · p
    fn apply_left(&self, coef: C64, p: &CMat, out: &mut CMat) {
        for &(r, rp, v) in &self.entries {
            let w = coef * v;
            let src = p.row(rp as usize);
            let mut dst = out.row_mut(r as usize);
            dst.zip_mut_with(&src, |d, s| *d += w * s);
        }
    }

    /// out += coef · p · op
    fn apply_right(&self, coef: C64, p: &CMat, out: &mut CMat) {
        for &(rp, c, v) in &self.entries {
            let w = coef * v;
            let src = p.column(rp as usize);
            let mut dst = out.column_mut(c as usize);
            dst.zip_mut_with(&src, |d, s| *d += w * s);
        }
    }

    /// Dense materialisation, for construction-time verification paths.
    fn to_dense(&self, d: usize) -> CMat {
        let mut m = Array2::zeros((d, d));
        for &(r, c, v) in &self.entries {
            m[[r as usize, c as usize]] += C64::new(v, 0.0);
        }
        m
    }
}

/// Pre-assembled generator for one enlarged system; immutable and safe to
/// share across workers.
pub struct Generator {
    dim: usize,
    rc_space_dim: usize,
    /// diagonal of H (qubit splitting, RC ladders, counter-term shift)
    h_diag: Vec<f64>,
    /// per RC: g·(X ⊗ position) coupling terms of H
    h_coupling: Vec<Coo>,
    /// per RC: position operator Aᵢ
    a_ops: Vec<Coo>,
    chi: Vec<CMat>,
    h_dense: CMat,
    eigenvalues: Array1<f64>,
    spec: HilbertSpec,
}

impl Generator {
    /// Build rates from scratch. Each peak costs a principal-value grid;
    /// reuse [`Generator::with_rates`] when sweeping truncations.
    pub fn new(spec: &HilbertSpec, bath: &BathSpec, cfg: &QuadratureConfig) -> Result<Self> {
        let rates = spec
            .rcs()
            .iter()
            .map(|rc| {
                let mapped = MappedSd::new(rc, cfg)?;
                Ok(RcRates::new(mapped, bath))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_rates(spec, bath, &rates, cfg)
    }

    pub fn with_rates(
        spec: &HilbertSpec,
        bath: &BathSpec,
        rates: &[RcRates],
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if rates.len() != spec.rcs().len() {
            return Err(Error::Dimension("one rate set per reaction coordinate".into()));
        }
        let d = spec.total_dim();
        let rc_space_dim = spec.rc_space_dim();
        let rate_ops = build_rate_operators(spec, bath, rates, cfg)?;

        // ξ = χ† given real rates and Hermitian A; verified here so the
        // rhs may fold the ξ commutator into a Hermitian conjugate
        for (chi, xi) in rate_ops.chi.iter().zip(&rate_ops.xi) {
            let defect = max_abs(&(xi - &super::adjoint(chi)));
            let scale = max_abs(chi).max(1e-30);
            if defect > 1e-10 * scale.max(1.0) {
                return Err(Error::Linalg(format!(
                    "rate operators violate ξ = χ†: defect {defect:.3e}"
                )));
            }
        }

        let h = spec.build_hamiltonian()?;
        let (h_diag, h_coupling, a_ops) = assemble_sparse_parts(spec);

        // cross-check the sparse assembly against the dense kron route
        let mut rebuilt = Array2::zeros((d, d));
        for (i, v) in h_diag.iter().enumerate() {
            rebuilt[[i, i]] = C64::new(*v, 0.0);
        }
        for coup in &h_coupling {
            rebuilt = rebuilt + coup.to_dense(d);
        }
        let defect = max_abs(&(&rebuilt - h.matrix()));
        if defect > 1e-12 * max_abs(h.matrix()).max(1.0) {
            return Err(Error::Linalg(format!(
                "sparse Hamiltonian disagrees with dense assembly: {defect:.3e}"
            )));
        }

        Ok(Generator {
            dim: d,
            rc_space_dim,
            h_diag,
            h_coupling,
            a_ops,
            chi: rate_ops.chi,
            h_dense: h.matrix().clone(),
            eigenvalues: rate_ops.eigenvalues,
            spec: spec.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rc_space_dim(&self) -> usize {
        self.rc_space_dim
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h_dense
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    /// Spread of the Hamiltonian spectrum; bounds every Bohr frequency.
    pub fn bohr_halfwidth(&self) -> f64 {
        let n = self.eigenvalues.len();
        self.eigenvalues[n - 1] - self.eigenvalues[0]
    }

    pub fn num_rcs(&self) -> usize {
        self.a_ops.len()
    }

    /// dρ/dt into `out`, using `work` and `t_buf` as d×d scratch.
    pub fn rhs_into(&self, rho: &CMat, out: &mut CMat, work: &mut CMat, t_buf: &mut CMat) {
        let d = self.dim;
        let minus_i = C64::new(0.0, -1.0);

        // -i (diag(H) ρ - ρ diag(H))
        for r in 0..d {
            let dr = self.h_diag[r];
            let mut row = out.row_mut(r);
            let src = rho.row(r);
            for c in 0..d {
                row[c] = minus_i * (dr - self.h_diag[c]) * src[c];
            }
        }
        // -i (Hc ρ - ρ Hc) for the coupling terms
        for coup in &self.h_coupling {
            coup.apply_left(minus_i, rho, out);
            coup.apply_right(-minus_i, rho, out);
        }

        // T = Σᵢ (Aᵢ χᵢ ρ - χᵢ ρ Aᵢ); dissipator = -(T + T†)
        t_buf.fill(C64::new(0.0, 0.0));
        let one = C64::new(1.0, 0.0);
        for (chi, a) in self.chi.iter().zip(&self.a_ops) {
            general_mat_mul(one, chi, rho, C64::new(0.0, 0.0), work);
            a.apply_left(one, work, t_buf);
            a.apply_right(-one, work, t_buf);
        }
        for r in 0..d {
            for c in 0..d {
                out[[r, c]] -= t_buf[[r, c]] + t_buf[[c, r]].conj();
            }
        }
    }

    /// Allocating convenience wrapper around [`Generator::rhs_into`].
    pub fn rhs(&self, rho: &CMat) -> CMat {
        let d = self.dim;
        let mut out = Array2::zeros((d, d));
        let mut work = Array2::zeros((d, d));
        let mut t_buf = Array2::zeros((d, d));
        self.rhs_into(rho, &mut out, &mut work, &mut t_buf);
        out
    }
}

/// Sparse pieces of H and the Aᵢ from index arithmetic on the factor
/// ordering qubit ⊗ RC₁ ⊗ … ⊗ RC_N.
fn assemble_sparse_parts(spec: &HilbertSpec) -> (Vec<f64>, Vec<Coo>, Vec<Coo>) {
    let dims = spec.rc_dims();
    let n_rc = dims.len();
    let rc_space: usize = dims.iter().product();
    let d = 2 * rc_space;

    // strides: index = q·rc_space + Σᵢ mᵢ·strideᵢ
    let mut strides = vec![0usize; n_rc];
    let mut acc = 1usize;
    for i in (0..n_rc).rev() {
        strides[i] = acc;
        acc *= dims[i];
    }

    let level = |r: usize, i: usize| (r % rc_space) / strides[i] % dims[i];
    let qubit = |r: usize| r / rc_space;

    let mut h_diag = vec![0.0; d];
    let counter_shift: f64 = spec
        .rcs()
        .iter()
        .map(|rc| rc.coupling() * rc.coupling() / rc.frequency())
        .sum();
    for (r, slot) in h_diag.iter_mut().enumerate() {
        let sz = if qubit(r) == 0 { 1.0 } else { -1.0 };
        let mut v = 0.5 * spec.omega0() * sz + counter_shift;
        for i in 0..n_rc {
            v += spec.rcs()[i].frequency() * level(r, i) as f64;
        }
        *slot = v;
    }

    let mut a_ops = Vec::with_capacity(n_rc);
    let mut h_coupling = Vec::with_capacity(n_rc);
    for i in 0..n_rc {
        let g = spec.rcs()[i].coupling();
        let mut a_entries = Vec::with_capacity(2 * d);
        let mut c_entries = Vec::with_capacity(2 * d);
        for r in 0..d {
            let m = level(r, i);
            // raising neighbour: row r couples to r + stride with √(m+1)
            if m + 1 < dims[i] {
                let v = ((m + 1) as f64).sqrt();
                let rp = r + strides[i];
                a_entries.push((r as u32, rp as u32, v));
                a_entries.push((rp as u32, r as u32, v));
                match spec.coupling() {
                    CouplingOp::SigmaZ => {
                        let sz = if qubit(r) == 0 { 1.0 } else { -1.0 };
                        c_entries.push((r as u32, rp as u32, g * v * sz));
                        c_entries.push((rp as u32, r as u32, g * v * sz));
                    }
                    CouplingOp::SigmaX => {
                        let flip =
                            |x: usize| if qubit(x) == 0 { x + rc_space } else { x - rc_space };
                        c_entries.push((r as u32, flip(rp) as u32, g * v));
                        c_entries.push((rp as u32, flip(r) as u32, g * v));
                    }
                }
            }
        }
        a_ops.push(Coo { entries: a_entries });
        h_coupling.push(Coo { entries: c_entries });
    }

    (h_diag, h_coupling, a_ops)
}
