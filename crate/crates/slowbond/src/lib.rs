//! Simulation and numerics laboratory for the symmetric simple exclusion
//! process (SSEP) with a slow bond and its weakly asymmetric perturbation
//! (WASEP).
//!
//! The lattice is the discrete torus 𝕋_N with one defective bond, between
//! sites N−1 ≡ −1 and 0, whose exchange rate carries an extra factor 1/N.
//! Under diffusive scaling the density profile solves a heat equation on the
//! torus cut at the slow bond, with Robin boundary conditions coupling the two
//! sides of the cut (Fick's law: flux proportional to the concentration jump).
//! The weakly asymmetric dynamics tilt every exchange by e^{±δ_N H} for a
//! smooth space-time field H, and the corresponding hydrodynamic equation is
//! quasilinear with a nonlinear Robin condition φ(ρ, H) at the cut.
//!
//! The crate provides, as separately usable modules:
//!
//! - [`lattice`] — exact event-driven continuous-time simulation of both
//!   dynamics (Fenwick-tree categorical sampling, thinning for
//!   time-dependent rates), deterministic per seed.
//! - [`measure`] — empirical measures, local averages and the two
//!   mollification kernels (box kernel ι_ε respecting the cut, smooth
//!   kernel ι_γˢ).
//! - [`pde`] — finite-volume solvers for the hydrodynamic equations and
//!   weak-form residual evaluation.
//! - [`rate`] — the large-deviations functionals ℓ_H, Φ_H, Ĵ_H, the energy
//!   functional, and the closed-form rate value with its Γ-terms.
//! - [`inverse`] — the elliptic inverse problem: given a smooth strictly
//!   interior density path, reconstruct the perturbation H that drives it.
//! - [`girsanov`] — exact log Radon–Nikodym accumulation along simulated
//!   trajectories and Monte Carlo estimation of the specific relative
//!   entropy.
//! - [`harness`] — JSON-configured experiment driver with CSV/JSON reports.
//!
//! Runnable demonstrations for each capability live in `examples/`; the thin
//! `slowbond` binary exposes the same entry points as subcommands.

pub mod field;
pub mod fenwick;
pub mod girsanov;
pub mod grid;
pub mod harness;
pub mod inverse;
pub mod lattice;
pub mod measure;
pub mod pde;
pub mod profile;
pub mod rate;

pub use field::{FieldSpec, LinearCombination, PerturbationField, ZeroField};
pub use girsanov::{estimate_entropy, log_rn, EntropyEstimate, GirsanovAccumulator};
pub use grid::{DensityField, DensityPath};
pub use harness::{run, sweep, ExperimentConfig, ExperimentKind, ExperimentReport};
pub use inverse::{build_h, coefficients, solve_root, BuiltPerturbation, EllipticCoefficients, RootResult};
pub use lattice::{
    bond_rate, exchange, initial_from_profile, simulate, BondRates, Configuration, DynamicsSpec,
    Mode, Trajectory,
};
pub use measure::{convolve_box, convolve_smooth, local_average, BoxKernel, EmpiricalMeasure, SmoothKernel};
pub use pde::{solve_perturbed, solve_symmetric, weak_residual, PdeSolution};
pub use profile::DensityProfile;
pub use rate::{
    big_gamma, chi, ell, energy, energy_of, j_hat, phi, psi, rate_closed_form, RateBreakdown,
};

/// Errors surfaced by the simulation, solver and harness layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter fails a precondition (lattice too small, horizon ≤ 0, …).
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    /// Time step violates the diffusive stability constraint dt ≤ 0.25/m².
    #[error("CFL violation: dt = {dt:e} exceeds limit {limit:e} for m = {m}")]
    Cfl { dt: f64, limit: f64, m: usize },
    /// A solver state left [0, 1]; the step size or the data are inconsistent.
    #[error("density bounds violated at t = {t}: value {value}")]
    BoundsViolated { t: f64, value: f64 },
    /// Input field or profile outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),
    /// A test field violates the compact-support requirement of the energy.
    #[error("support violation: {0}")]
    Support(String),
    /// Harness configuration could not be interpreted.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
