//! The enlarged system: qubit ⊗ truncated reaction coordinates.
//!
//! Builds the post-mapping Hamiltonian, the thermal rate operators and the
//! master-equation generator, integrates trajectories, reduces them back to
//! the qubit, and provides the exact pure-dephasing solution plus the
//! dimension-convergence benchmark that calibrates the truncation table.

mod benchmark;
mod dephasing;
mod generator;
mod integrate;
mod rates;

pub use benchmark::{benchmark_rc_dims, BenchmarkOutcome};
pub use dephasing::{decoherence_function, exact_dephasing};
pub use generator::Generator;
pub use integrate::{evolve, evolve_density, IntegratorKind, IntegratorStats};
pub use rates::{build_rate_operators, RateOperators, RcRates};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, dagger, identity, kron, ladder_position, max_hermiticity_defect,
    number_operator, sigma_x, sigma_z, CMat,
};
use crate::rcmap::ReactionCoordinate;

/// Number of samples and time span shared by the trajectory grid, the
/// dimension benchmark and the dataset generator.
pub const SAMPLE_POINTS: usize = 400;
pub const TIME_SPAN: f64 = 50.0;

/// The uniform grid t_p = 50 p / 399, inclusive of both endpoints.
pub fn sample_grid() -> Vec<f64> {
    (0..SAMPLE_POINTS)
        .map(|p| TIME_SPAN * p as f64 / (SAMPLE_POINTS - 1) as f64)
        .collect()
}

/// System operator coupling to the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingOp {
    /// X = σx: amplitude damping, the configuration the datasets use.
    SigmaX,
    /// X = σz: pure dephasing, exactly solvable and used for benchmarks.
    SigmaZ,
}

impl CouplingOp {
    pub fn matrix(&self) -> CMat {
        match self {
            CouplingOp::SigmaX => sigma_x(),
            CouplingOp::SigmaZ => sigma_z(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CouplingOp::SigmaX => "sigma_x",
            CouplingOp::SigmaZ => "sigma_z",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "sigma_x" => Ok(CouplingOp::SigmaX),
            "sigma_z" => Ok(CouplingOp::SigmaZ),
            other => Err(Error::Parse { line: 0, msg: format!("unknown coupling `{other}`") }),
        }
    }
}

/// Default cap on the enlarged dimension; override with
/// [`HilbertSpec::with_max_dim`].
pub const DEFAULT_MAX_DIM: usize = 4096;

/// The enlarged Hilbert space: qubit ⊗ RC₁ ⊗ … ⊗ RC_N with that factor
/// ordering fixed.
#[derive(Debug, Clone)]
pub struct HilbertSpec {
    omega0: f64,
    coupling: CouplingOp,
    rcs: Vec<ReactionCoordinate>,
    max_dim: usize,
}

impl HilbertSpec {
    /// Every reaction coordinate must already carry its truncation.
    pub fn new(omega0: f64, coupling: CouplingOp, rcs: Vec<ReactionCoordinate>) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::Domain(format!("level spacing must be positive, got {omega0}")));
        }
        for rc in &rcs {
            if rc.dim().is_none() {
                return Err(Error::Domain(
                    "every reaction coordinate needs an assigned dimension".into(),
                ));
            }
        }
        let spec = HilbertSpec { omega0, coupling, rcs, max_dim: DEFAULT_MAX_DIM };
        let dim = spec.total_dim();
        if dim > spec.max_dim {
            return Err(Error::DimensionOverflow { dim, max: spec.max_dim });
        }
        Ok(spec)
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Result<Self> {
        self.max_dim = max_dim;
        let dim = self.total_dim();
        if dim > max_dim {
            return Err(Error::DimensionOverflow { dim, max: max_dim });
        }
        Ok(self)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling(&self) -> CouplingOp {
        self.coupling
    }

    pub fn rcs(&self) -> &[ReactionCoordinate] {
        &self.rcs
    }

    /// RC ladder dimensions in tensor order.
    pub fn rc_dims(&self) -> Vec<usize> {
        self.rcs.iter().map(|rc| rc.dim().expect("validated")).collect()
    }

    /// Product of the RC dimensions (the qubit stride).
    pub fn rc_space_dim(&self) -> usize {
        self.rc_dims().iter().product()
    }

    pub fn total_dim(&self) -> usize {
        2 * self.rc_space_dim()
    }

    /// H = (ω₀/2)σz⊗1 + Σᵢ Ωᵢ bᵢ†bᵢ + Σᵢ gᵢ X⊗(bᵢ+bᵢ†) + Σᵢ (gᵢ²/Ωᵢ) X²⊗1.
    pub fn build_hamiltonian(&self) -> Result<QuantumOperator> {
        let dims = self.rc_dims();
        let mut h = kron(
            &(sigma_z() * C64::new(0.5 * self.omega0, 0.0)),
            &identity(self.rc_space_dim()),
        );
        for (i, rc) in self.rcs.iter().enumerate() {
            let omega = rc.frequency();
            let g = rc.coupling();
            h = h + self.embed_rc(&(number_operator(dims[i]) * C64::new(omega, 0.0)), i, &identity(2));
            h = h + self.embed_rc(
                &(ladder_position(dims[i]) * C64::new(g, 0.0)),
                i,
                &self.coupling.matrix(),
            );
            // X² = 1 for both couplings, so the counter-term is a uniform shift
            let shift = C64::new(g * g / omega, 0.0);
            let d = self.total_dim();
            h = h + identity(d) * shift;
        }
        QuantumOperator::hermitian(h)
    }

    /// A_i = 1 ⊗ (b_i + b_i†) ⊗ 1 as a dense matrix.
    pub fn rc_position_operator(&self, i: usize) -> CMat {
        let dims = self.rc_dims();
        self.embed_rc(&ladder_position(dims[i]), i, &identity(2))
    }

    /// σx ⊗ 1 on the enlarged space; the observable sampled by datasets.
    pub fn observable_sigma_x(&self) -> QuantumOperator {
        QuantumOperator::hermitian(kron(&sigma_x(), &identity(self.rc_space_dim())))
            .expect("σx ⊗ 1 is Hermitian")
    }

    /// ρ_qubit ⊗ (thermal RC states at the bath temperature).
    pub fn initial_product_state(&self, rho_qubit: &CMat, beta: f64) -> Result<DensityMatrix> {
        if rho_qubit.nrows() != 2 || rho_qubit.ncols() != 2 {
            return Err(Error::Dimension("qubit state must be 2x2".into()));
        }
        let mut rho = rho_qubit.clone();
        for rc in &self.rcs {
            let th = thermal_rc_state(rc.frequency(), beta, rc.dim().expect("validated"))?;
            rho = kron(&rho, &th);
        }
        DensityMatrix::new(rho)
    }

    fn embed_rc(&self, op: &CMat, i: usize, qubit_op: &CMat) -> CMat {
        let dims = self.rc_dims();
        let mut out = qubit_op.clone();
        for (j, &m) in dims.iter().enumerate() {
            if j == i {
                out = kron(&out, op);
            } else {
                out = kron(&out, &identity(m));
            }
        }
        out
    }
}

/// Dense complex operator with a declared Hermitian flag.
#[derive(Debug, Clone)]
pub struct QuantumOperator {
    matrix: CMat,
    hermitian: bool,
}

impl QuantumOperator {
    /// Flags the operator Hermitian after checking the defect ≤ 1e-12.
    pub fn hermitian(matrix: CMat) -> Result<Self> {
        let defect = max_hermiticity_defect(&matrix);
        if defect > 1e-12 {
            return Err(Error::Domain(format!(
                "operator declared Hermitian but defect is {defect:.3e}"
            )));
        }
        Ok(QuantumOperator { matrix, hermitian: true })
    }

    pub fn general(matrix: CMat) -> Self {
        QuantumOperator { matrix, hermitian: false }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Density matrix with construction-time validation: Hermitian to 1e-10,
/// unit trace to 1e-8, eigenvalues ≥ -1e-8.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let defect = max_hermiticity_defect(&matrix);
        if defect > 1e-10 {
            return Err(Error::Domain(format!("density matrix Hermiticity defect {defect:.3e}")));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::Domain(format!("density matrix trace {tr} != 1")));
        }
        let min_eig = linalg::min_eigenvalue(&matrix)?;
        if min_eig < -1e-8 {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    /// For internal evolution states whose invariants are monitored by the
    /// integrator instead of re-diagonalised at every step.
    pub(crate) fn unchecked(matrix: CMat) -> Self {
        DensityMatrix { matrix }
    }

    pub fn from_pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let d = ket.len();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = ket[i] * ket[j].conj() / norm;
            }
        }
        DensityMatrix::new(m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }
}

/// |+⟩⟨+| on the qubit.
pub fn plus_state() -> CMat {
    let h = C64::new(0.5, 0.0);
    ndarray::array![[h, h], [h, h]]
}

/// Thermal state of one truncated RC ladder: diagonal e^{-βΩn}/Z with the
/// truncated normalisation Z = Σ_{n<M} e^{-βΩn}.
pub fn thermal_rc_state(omega: f64, beta: f64, m: usize) -> Result<CMat> {
    if !(omega > 0.0 && beta > 0.0) {
        return Err(Error::Domain("thermal state needs Ω > 0 and β > 0".into()));
    }
    if m < 2 {
        return Err(Error::Domain(format!("RC dimension must be at least 2, got {m}")));
    }
    let q = (-beta * omega).exp();
    let weights: Vec<f64> = (0..m).map(|n| q.powi(n as i32)).collect();
    let z: f64 = weights.iter().sum();
    let mut rho = Array2::zeros((m, m));
    for (n, w) in weights.iter().enumerate() {
        rho[[n, n]] = C64::new(w / z, 0.0);
    }
    Ok(rho)
}

/// Occupation weight lost to the truncation: the untruncated geometric
/// distribution's mass beyond level M-1.
pub fn thermal_truncation_loss(omega: f64, beta: f64, m: usize) -> f64 {
    (-beta * omega * m as f64).exp()
}

/// Trace out every reaction coordinate, leaving the 2x2 qubit state.
pub fn partial_trace_rcs(rho: &CMat, rc_space_dim: usize) -> Result<CMat> {
    let d = rho.nrows();
    if rho.ncols() != d || d != 2 * rc_space_dim {
        return Err(Error::Dimension(format!(
            "state of dim {d} inconsistent with RC space of dim {rc_space_dim}"
        )));
    }
    let mut out = Array2::zeros((2, 2));
    for q in 0..2 {
        for qp in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..rc_space_dim {
                acc += rho[[q * rc_space_dim + r, qp * rc_space_dim + r]];
            }
            out[[q, qp]] = acc;
        }
    }
    Ok(out)
}

/// Re tr(Oρ) for a Hermitian observable. The imaginary residue is checked
/// against 1e-8 and surfaced as a diagnostic if it leaks above that.
pub fn observable_expectation(rho: &DensityMatrix, obs: &QuantumOperator) -> Result<f64> {
    if !obs.is_hermitian() {
        return Err(Error::Domain("expectation requires a Hermitian observable".into()));
    }
    if obs.dim() != rho.dim() {
        return Err(Error::Dimension("observable and state dimensions differ".into()));
    }
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for k in 0..rho.dim() {
            tr += obs.matrix()[[i, k]] * rho.matrix()[[k, i]];
        }
    }
    if tr.im.abs() >= 1e-8 {
        return Err(Error::Diagnostic {
            t: f64::NAN,
            msg: format!("expectation imaginary residue {:.3e}", tr.im),
        });
    }
    Ok(tr.re)
}

/// ⟨σx⟩ of the embedded qubit without forming the reduced state.
#[allow(dead_code)] // wired up by the dataset generator
pub(crate) fn sigma_x_expectation(rho: &CMat, rc_space_dim: usize) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..rc_space_dim {
        acc += rho[[r, rc_space_dim + r]] + rho[[rc_space_dim + r, r]];
    }
    acc.re
}

/// Qubit coherence ⟨0|ρ_S|1⟩ of the embedded qubit.
pub(crate) fn qubit_coherence(rho: &CMat, rc_space_dim: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..rc_space_dim {
        acc += rho[[r, rc_space_dim + r]];
    }
    acc
}

/// One sampled expectation-value trajectory with its provenance header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: TrajectoryMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub sd_record: String,
    pub beta: f64,
    pub omega0: f64,
    pub coupling: String,
    pub dims: Vec<usize>,
    pub integrator: String,
    pub steps: usize,
    pub rhs_evals: usize,
}

pub const TRAJECTORY_FORMAT: &str = "rcsd-traj v1";

impl Trajectory {
    /// Times must be strictly increasing; σx values are clipped nowhere but
    /// validated against the observable bound with a 1e-6 allowance.
    pub fn new(times: Vec<f64>, values: Vec<f64>, meta: TrajectoryMeta) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Dimension("times and values lengths differ".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("trajectory times must be strictly increasing".into()));
        }
        Ok(Trajectory { times, values, meta })
    }

    /// Single header line followed by `t,value` rows at 17 significant
    /// digits.
    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let dims = m.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        let mut s = format!(
            "{TRAJECTORY_FORMAT}|sd={}|beta={}|omega0={}|coupling={}|dims={}|integrator={}|steps={}|evals={}\n",
            m.sd_record, m.beta, m.omega0, m.coupling, dims, m.integrator, m.steps, m.rhs_evals,
        );
        for (t, v) in self.times.iter().zip(&self.values) {
            s.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "empty trajectory file".into() })?;
        let mut fields = header.split('|');
        let version = fields.next().unwrap_or_default();
        if version != TRAJECTORY_FORMAT {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{TRAJECTORY_FORMAT}`, got `{version}`"),
            });
        }
        let mut meta = TrajectoryMeta {
            sd_record: String::new(),
            beta: f64::NAN,
            omega0: f64::NAN,
            coupling: String::new(),
            dims: Vec::new(),
            integrator: String::new(),
            steps: 0,
            rhs_evals: 0,
        };
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or(Error::Parse { line: 1, msg: format!("bad header field `{field}`") })?;
            let perr = |e: String| Error::Parse { line: 1, msg: e };
            match key {
                "sd" => meta.sd_record = value.to_string(),
                "beta" => meta.beta = value.parse().map_err(|e| perr(format!("beta: {e}")))?,
                "omega0" => meta.omega0 = value.parse().map_err(|e| perr(format!("omega0: {e}")))?,
                "coupling" => meta.coupling = value.to_string(),
                "dims" => {
                    if !value.is_empty() {
                        meta.dims = value
                            .split(',')
                            .map(|t| t.parse().map_err(|e| perr(format!("dims: {e}"))))
                            .collect::<Result<_>>()?;
                    }
                }
                "integrator" => meta.integrator = value.to_string(),
                "steps" => meta.steps = value.parse().map_err(|e| perr(format!("steps: {e}")))?,
                "evals" => meta.rhs_evals = value.parse().map_err(|e| perr(format!("evals: {e}")))?,
                other => return Err(perr(format!("unknown header key `{other}`"))),
            }
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (t, v) = line
                .split_once(',')
                .ok_or(Error::Parse { line: i + 1, msg: "expected `t,value`".into() })?;
            times.push(t.trim().parse().map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad time: {e}"),
            })?);
            values.push(v.trim().parse().map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad value: {e}"),
            })?);
        }
        Trajectory::new(times, values, meta)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_text(&text)
    }
}

pub(crate) fn adjoint(a: &CMat) -> CMat {
    dagger(a)
}
