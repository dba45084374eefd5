//! Forward model, Gaussian likelihood and synthetic data for the Darcy
//! inverse problem.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use ess_core::rng::stream;

use crate::error::{EllipticError, Result};
use crate::grid::{block_average, GridSpec};
use crate::kl::{field_from_coeffs, kl_basis, KlBasis};
use crate::solver::{solve_pressure, PressureSolution, DEFAULT_SOLVER_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LikelihoodMode {
    /// `-(1 / (2 sigma^2)) sum r^2`.
    #[default]
    Gaussian,
    /// `-(1 / sigma^2) sum r^2`.
    GaussianNoHalf,
    /// `l == 0`, no forward solve. The posterior equals the prior.
    Disabled,
}

/// Everything needed to build an [`EllipticModel`]; JSON-friendly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub n_modes: usize,
    pub noise_var: f64,
    pub solver_tol: f64,
    pub likelihood: LikelihoodMode,
    /// Block size of the delayed-acceptance coarse grid.
    pub coarsen: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            nx: 16,
            ny: 16,
            lx: 0.2,
            ly: 0.2,
            n_modes: 20,
            noise_var: 1e-3,
            solver_tol: DEFAULT_SOLVER_TOL,
            likelihood: LikelihoodMode::Gaussian,
            coarsen: 2,
        }
    }
}

impl ModelConfig {
    /// Fine model with chessboard observation cells and no data yet.
    pub fn build(&self) -> Result<EllipticModel> {
        let grid = GridSpec::new(self.nx, self.ny)?;
        let basis = kl_basis(&grid, self.lx, self.ly, self.n_modes)?;
        EllipticModel::new(basis, self.noise_var, self.solver_tol, self.likelihood)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticModel {
    /// Fine grid on which the KL basis lives.
    pub grid: GridSpec,
    pub basis: KlBasis,
    /// 1 for the fine model; otherwise the forward problem is solved on
    /// `grid.coarsen(coarsen)` with block-averaged log-permeability.
    pub coarsen: usize,
    /// Observation cells on the solve grid.
    pub obs_cells: Vec<usize>,
    pub noise_var: f64,
    pub data: Vec<f64>,
    pub solver_tol: f64,
    pub likelihood: LikelihoodMode,
}

impl EllipticModel {
    pub fn new(
        basis: KlBasis,
        noise_var: f64,
        solver_tol: f64,
        likelihood: LikelihoodMode,
    ) -> Result<Self> {
        if !(noise_var > 0.0) {
            return Err(EllipticError::Argument(format!(
                "noise_var = {noise_var} must be positive"
            )));
        }
        let grid = basis.grid;
        Ok(Self {
            grid,
            obs_cells: grid.chessboard(),
            basis,
            coarsen: 1,
            noise_var,
            data: Vec::new(),
            solver_tol,
            likelihood,
        })
    }

    pub fn with_data(mut self, data: Vec<f64>) -> Result<Self> {
        if data.len() != self.obs_cells.len() {
            return Err(EllipticError::Argument(format!(
                "{} data values for {} observation cells",
                data.len(),
                self.obs_cells.len()
            )));
        }
        self.data = data;
        Ok(self)
    }

    pub fn n_params(&self) -> usize {
        self.basis.n_modes()
    }

    pub fn solve_grid(&self) -> GridSpec {
        self.grid
            .coarsen(self.coarsen)
            .expect("coarsening validated at construction")
    }

    /// Log-permeability on the fine grid.
    pub fn eta(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(field_from_coeffs(&self.basis, theta)?.0)
    }

    /// Permeability on the solve grid.
    pub fn kappa(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let eta = block_average(&self.eta(theta)?, &self.grid, self.coarsen)?;
        Ok(eta.into_iter().map(f64::exp).collect())
    }

    pub fn forward(&self, theta: &[f64]) -> Result<PressureSolution> {
        solve_pressure(&self.kappa(theta)?, &self.solve_grid(), self.solver_tol)
    }

    /// Pressure at the observation cells.
    pub fn observe(&self, pressure: &[f64]) -> Vec<f64> {
        self.obs_cells.iter().map(|&c| pressure[c]).collect()
    }

    /// Gaussian log-likelihood of a solved pressure field.
    pub fn log_likelihood(&self, pressure: &[f64]) -> Result<f64> {
        let scale = match self.likelihood {
            LikelihoodMode::Disabled => return Ok(0.0),
            LikelihoodMode::Gaussian => 0.5 / self.noise_var,
            LikelihoodMode::GaussianNoHalf => 1.0 / self.noise_var,
        };
        if self.data.len() != self.obs_cells.len() {
            return Err(EllipticError::Argument("model has no data attached".into()));
        }
        let ss: f64 = self
            .obs_cells
            .iter()
            .zip(&self.data)
            .map(|(&c, d)| (d - pressure[c]).powi(2))
            .sum();
        Ok(-scale * ss)
    }

    /// Log-likelihood of the coefficients; skips the solve when disabled.
    pub fn log_likelihood_theta(&self, theta: &[f64]) -> Result<f64> {
        if self.likelihood == LikelihoodMode::Disabled {
            if theta.len() != self.n_params() {
                return Err(EllipticError::Argument(format!(
                    "expected {} coefficients, got {}",
                    self.n_params(),
                    theta.len()
                )));
            }
            return Ok(0.0);
        }
        self.log_likelihood(&self.forward(theta)?.pressure)
    }

    /// Screening model on the grid coarsened by `factor`.
    ///
    /// Coarse observation cells are the coarse chessboard cells with at least
    /// two observed children; each coarse datum is the mean of the fine data
    /// at those children.
    pub fn coarse_model(&self, factor: usize) -> Result<EllipticModel> {
        if self.coarsen != 1 {
            return Err(EllipticError::Argument(
                "coarse model must be derived from the fine model".into(),
            ));
        }
        let coarse = self.grid.coarsen(factor)?;
        let have_data = self.data.len() == self.obs_cells.len();
        let mut obs_cells = Vec::new();
        let mut data = Vec::new();
        for c in coarse.chessboard() {
            let observed: Vec<usize> = self
                .grid
                .children(c, factor)
                .into_iter()
                .filter_map(|f| self.obs_cells.iter().position(|&o| o == f))
                .collect();
            if observed.len() >= 2 {
                obs_cells.push(c);
                if have_data {
                    data.push(
                        observed.iter().map(|&k| self.data[k]).sum::<f64>() / observed.len() as f64,
                    );
                }
            }
        }
        Ok(EllipticModel {
            grid: self.grid,
            basis: self.basis.clone(),
            coarsen: factor,
            obs_cells,
            noise_var: self.noise_var,
            data,
            solver_tol: self.solver_tol,
            likelihood: self.likelihood,
        })
    }
}

/// Synthetic observations `F(theta_star) + eps`, `eps ~ N(0, sigma^2 I)`.
///
/// With `add_noise = false` the noiseless forward observations are returned.
pub fn synthesize_data(
    model: &EllipticModel,
    theta_star: &[f64],
    noise_seed: u64,
    add_noise: bool,
) -> Result<Vec<f64>> {
    let sol = model.forward(theta_star)?;
    let mut obs = model.observe(&sol.pressure);
    if add_noise {
        let sd = model.noise_var.sqrt();
        let mut rng = stream(noise_seed, 0);
        for o in obs.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *o += sd * z;
        }
    }
    Ok(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EllipticModel {
        ModelConfig {
            nx: 8,
            ny: 8,
            n_modes: 6,
            ..Default::default()
        }
        .build()
        .unwrap()
    }

    #[test]
    fn perfect_fit_and_scaling() {
        let m = small();
        let p: Vec<f64> = (0..64).map(|c| c as f64 * 0.01).collect();
        let data = m.observe(&p);
        let m = m.with_data(data).unwrap();
        assert_eq!(m.log_likelihood(&p).unwrap(), 0.0);

        let mut q = p.clone();
        q[m.obs_cells[3]] += 0.1;
        let l1 = m.log_likelihood(&q).unwrap();
        assert!((l1 + 500.0 * 0.01).abs() < 1e-9);
        let mut m2 = m.clone();
        m2.noise_var *= 2.0;
        assert!((m2.log_likelihood(&q).unwrap() - l1 / 2.0).abs() < 1e-12);
        m2.likelihood = LikelihoodMode::GaussianNoHalf;
        assert!((m2.log_likelihood(&q).unwrap() - l1).abs() < 1e-12);
    }

    #[test]
    fn noiseless_data_at_zero_theta_is_linear() {
        let m = small();
        let d = synthesize_data(&m, &[0.0; 6], 1, false).unwrap();
        for (&c, v) in m.obs_cells.iter().zip(&d) {
            assert!((v - (1.0 - m.grid.center(c).0)).abs() < 1e-9);
        }
        let a = synthesize_data(&m, &[0.0; 6], 1, true).unwrap();
        let b = synthesize_data(&m, &[0.0; 6], 1, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coarse_observations() {
        let m = ModelConfig::default().build().unwrap();
        let data: Vec<f64> = (0..m.obs_cells.len()).map(|k| k as f64).collect();
        let m = m.with_data(data).unwrap();
        let c = m.coarse_model(2).unwrap();
        assert_eq!(c.solve_grid(), GridSpec::new(8, 8).unwrap());
        assert_eq!(c.obs_cells.len(), 32);
        assert_eq!(c.data.len(), 32);
        // coarse cell 0 covers fine cells 0 and 17 on the chessboard
        let k0 = m.obs_cells.iter().position(|&o| o == 0).unwrap();
        let k17 = m.obs_cells.iter().position(|&o| o == 17).unwrap();
        assert_eq!(c.data[0], (m.data[k0] + m.data[k17]) / 2.0);
        assert!(c.coarse_model(2).is_err());
    }

    #[test]
    fn disabled_skips_solve() {
        let mut m = small();
        m.likelihood = LikelihoodMode::Disabled;
        assert_eq!(m.log_likelihood_theta(&[50.0; 6]).unwrap(), 0.0);
        assert!(m.log_likelihood_theta(&[0.0; 5]).is_err());
    }
}
