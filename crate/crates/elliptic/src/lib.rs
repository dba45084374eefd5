//! Desk-scale Bayesian inverse problem for Darcy flow.
//!
//! A log-normal permeability field `kappa = exp(eta)` with a truncated
//! Karhunen-Loeve prior is inferred from noisy pressure observations on a
//! chessboard of cells. The posterior over the KL coefficients is sampled
//! with pCN Metropolis-Hastings, optionally screened by a coarse-grid model
//! (delayed acceptance).

pub mod error;
pub mod grid;
pub mod kl;
pub mod mcmc;
pub mod model;
pub mod solver;

pub use error::{EllipticError, Result};
pub use grid::{block_average, GridSpec};
pub use kl::{covariance_matrix, field_from_coeffs, kl_basis, KlBasis};
pub use mcmc::{
    da_step, pcn_propose, pcn_step, run_chain, step_rng, LogLikelihood, McmcState, RunStats,
    StepOutcome, DEFAULT_BETA,
};
pub use model::{synthesize_data, EllipticModel, LikelihoodMode, ModelConfig};
pub use solver::{solve_pressure, stencil_residual, system_rhs, PressureSolution, DEFAULT_SOLVER_TOL};
