//! AR(1) processes `X_t = a X_{t-1} + e_t`, `e_t ~ N(mu, sigma^2)`, with
//! their closed-form moments. These serve as exact ground truth for the
//! estimators.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{EssError, Result};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Params {
    pub a: f64,
    #[serde(default)]
    pub mu_eps: f64,
    #[serde(default = "one")]
    pub sigma_eps: f64,
}

fn one() -> f64 {
    1.0
}

impl Ar1Params {
    pub fn new(a: f64, mu_eps: f64, sigma_eps: f64) -> Result<Self> {
        let p = Self {
            a,
            mu_eps,
            sigma_eps,
        };
        p.validate()?;
        Ok(p)
    }

    /// Zero-mean, unit-innovation process with the given IACT.
    pub fn with_iact(tau: f64) -> Result<Self> {
        Self::new(ar1_coeff_for_iact(tau)?, 0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.abs() < 1.0) {
            return Err(EssError::Nonstationary(self.a));
        }
        if !(self.sigma_eps > 0.0) {
            return Err(EssError::Argument(format!(
                "sigma_eps = {} must be positive",
                self.sigma_eps
            )));
        }
        Ok(())
    }

    pub fn stationary_mean(&self) -> f64 {
        self.mu_eps / (1.0 - self.a)
    }

    pub fn stationary_var(&self) -> f64 {
        self.sigma_eps * self.sigma_eps / (1.0 - self.a * self.a)
    }

    /// `Var(mean of N draws) ~ sigma^2 / ((1 - a)^2 N)` for large N.
    pub fn mean_estimator_var(&self, n: usize) -> f64 {
        self.sigma_eps * self.sigma_eps / ((1.0 - self.a) * (1.0 - self.a) * n as f64)
    }

    /// Spectral density at frequency zero for the normalised process
    /// (`sigma^2` scaled so the stationary variance is one).
    pub fn spectral_density_at_zero(&self) -> f64 {
        (1.0 + self.a) / (2.0 * std::f64::consts::PI * (1.0 - self.a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ar1Init {
    /// `X_0` drawn from the stationary law.
    StationaryDraw,
    Fixed(f64),
}

/// `n` draws `X_1..X_n` following `X_0` chosen by `init`.
///
/// The stream is a ChaCha8 generator keyed by `seed`; normals come from the
/// ziggurat sampler, so the output is bit-identical across platforms.
pub fn ar1_simulate(params: &Ar1Params, n: usize, seed: u64, init: Ar1Init) -> Result<Chain> {
    params.validate()?;
    if n == 0 {
        return Err(EssError::Argument("n must be at least 1".into()));
    }
    let mut rng = stream(seed, 0);
    let mut x = match init {
        Ar1Init::StationaryDraw => {
            let z: f64 = rng.sample(StandardNormal);
            params.stationary_mean() + params.stationary_var().sqrt() * z
        }
        Ar1Init::Fixed(x0) => x0,
    };
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        x = params.a * x + params.mu_eps + params.sigma_eps * z;
        samples.push(x);
    }
    Chain::new(0, samples)
}

/// `(1 + a) / (1 - a)`.
pub fn ar1_exact_iact(a: f64) -> Result<f64> {
    if !(a.abs() < 1.0) {
        return Err(EssError::Nonstationary(a));
    }
    Ok((1.0 + a) / (1.0 - a))
}

/// Inverse of [`ar1_exact_iact`]: `a = (tau - 1) / (tau + 1)`.
pub fn ar1_coeff_for_iact(tau: f64) -> Result<f64> {
    if !(tau >= 1.0) || !tau.is_finite() {
        return Err(EssError::Argument(format!("IACT {tau} must be >= 1")));
    }
    Ok((tau - 1.0) / (tau + 1.0))
}

/// Mean and variance of `X_t` given the start.
///
/// For a fixed start `x0`:
///
/// ```text
/// E[X_t]   = a^t x0 + mu (1 - a^t) / (1 - a)
/// Var[X_t] = sigma^2 (1 - a^(2t)) / (1 - a^2)
/// ```
///
/// A stationary start gives the `t`-independent stationary moments.
pub fn ar1_transient_moments(params: &Ar1Params, t: u32, init: Ar1Init) -> Result<(f64, f64)> {
    params.validate()?;
    match init {
        Ar1Init::StationaryDraw => Ok((params.stationary_mean(), params.stationary_var())),
        Ar1Init::Fixed(x0) => {
            let a = params.a;
            let at = a.powi(t as i32);
            let mean = at * x0 + params.mu_eps * (1.0 - at) / (1.0 - a);
            let var = params.sigma_eps * params.sigma_eps * (1.0 - at * at) / (1.0 - a * a);
            Ok((mean, var))
        }
    }
}
