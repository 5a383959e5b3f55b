//! Dense complex linear algebra helpers shared across the dynamics modules.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Array2<C64>;

/// Tune the BLAS runtime once per process.
///
/// The system OpenBLAS mis-detects the CPU on some virtualised hosts and
/// falls back to pre-AVX kernels; pinning the core type when AVX-512 is
/// present recovers a ~4x speedup. Threading is pinned to one BLAS thread
/// because parallelism lives at the trajectory level.
/// Both variables are left untouched when already set by the caller.
pub fn init_blas() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
            std::env::set_var("OPENBLAS_NUM_THREADS", "1");
        }
        if std::env::var_os("OPENBLAS_CORETYPE").is_none()
            && is_x86_feature_detected!("avx512f")
        {
            std::env::set_var("OPENBLAS_CORETYPE", "SKYLAKEX");
        }
    });
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// In-place Hermitian projection: a ← (a + a†)/2.
pub fn hermitize(a: &mut CMat) {
    let n = a.nrows();
    for i in 0..n {
        a[[i, i]] = C64::new(a[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let m = 0.5 * (a[[i, j]] + a[[j, i]].conj());
            a[[i, j]] = m;
            a[[j, i]] = m.conj();
        }
    }
}

pub fn max_hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn trace(a: &CMat) -> C64 {
    a.diag().iter().sum()
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn sigma_x() -> CMat {
    ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ]
}

pub fn sigma_z() -> CMat {
    ndarray::array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ]
}

/// Truncated bosonic position operator b + b† on an m-level ladder.
pub fn ladder_position(m: usize) -> CMat {
    let mut a = Array2::zeros((m, m));
    for n in 0..m.saturating_sub(1) {
        let v = ((n + 1) as f64).sqrt();
        a[[n + 1, n]] = C64::new(v, 0.0);
        a[[n, n + 1]] = C64::new(v, 0.0);
    }
    a
}

/// Truncated number operator b†b.
pub fn number_operator(m: usize) -> CMat {
    Array2::from_diag(&Array1::from_iter((0..m).map(|n| C64::new(n as f64, 0.0))))
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary of eigenvectors as columns.
pub fn eigh_hermitian(a: &CMat) -> Result<(Array1<f64>, CMat)> {
    init_blas();
    a.eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("hermitian eigensolver failed: {e}")))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMat) -> Result<f64> {
    let (vals, _) = eigh_hermitian(a)?;
    Ok(vals[0])
}
