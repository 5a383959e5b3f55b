//! Dissipative spin-boson dynamics under structured (multi-Lorentzian)
//! spectral densities, simulated through the reaction-coordinate mapping,
//! plus the machinery to turn those dynamics into labelled datasets and
//! train dense networks that infer the spectral density back from a single
//! observable's time evolution.
//!
//! The crate is organised along the pipeline:
//!
//! - [`specden`]: Lorentzian spectral densities and their frequency-domain
//!   integrals (moments, bath correlation function, Cauchy principal values).
//! - [`rcmap`]: the reaction-coordinate mapping, the residual spectral
//!   density and the truncation-dimension table.
//! - [`dynamics`]: the enlarged qubit ⊗ RC system, the RC master equation,
//!   its integrators, the exact pure-dephasing benchmark and the
//!   dimension-convergence benchmark.
//! - [`dataset`]: sampling, trajectory generation, DFT features, filtering,
//!   splitting and persistence.
//! - [`mlnet`]: from-scratch dense networks (ReLU / softmax / linear),
//!   cross-entropy and MSE losses, Adam, metrics.
//! - [`analysis`]: Pearson correlations, peak-separation sweeps and
//!   plot-ready report emission.

pub mod analysis;
pub mod dataset;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod mlnet;
pub mod quad;
pub mod rcmap;
pub mod seeds;
pub mod specden;

pub use error::{Error, Result};
