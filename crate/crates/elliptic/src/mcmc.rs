//! Preconditioned Crank-Nicolson Metropolis-Hastings and its two-stage
//! delayed-acceptance variant.
//!
//! Variate-stream contract: step `t` of a chain seeded with `s` draws from
//! its own generator `stream(s, t)`. A pCN step consumes `m` standard
//! normals (the proposal noise) followed by one uniform `u`. A
//! delayed-acceptance step consumes the same `m` normals followed by two
//! uniforms `u1` (screen) and `u2` (fine stage); both are always drawn even
//! when the screen rejects. A proposal is accepted when `ln u < delta`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use ess_core::rng::stream;

use crate::error::{EllipticError, Result};
use crate::model::EllipticModel;

pub const DEFAULT_BETA: f64 = 0.1;

/// Log-likelihood of KL coefficients.
pub trait LogLikelihood {
    fn n_params(&self) -> usize;
    fn log_likelihood(&self, theta: &[f64]) -> Result<f64>;
}

impl LogLikelihood for EllipticModel {
    fn n_params(&self) -> usize {
        EllipticModel::n_params(self)
    }

    fn log_likelihood(&self, theta: &[f64]) -> Result<f64> {
        self.log_likelihood_theta(theta)
    }
}

impl<L: LogLikelihood + ?Sized> LogLikelihood for &L {
    fn n_params(&self) -> usize {
        (**self).n_params()
    }

    fn log_likelihood(&self, theta: &[f64]) -> Result<f64> {
        (**self).log_likelihood(theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcState {
    pub theta: Vec<f64>,
    pub log_like_fine: f64,
    pub log_like_coarse: Option<f64>,
    pub iteration: u64,
}

impl McmcState {
    /// State at `theta` with likelihoods evaluated; pass a coarse model to
    /// prepare for delayed acceptance.
    pub fn new<F: LogLikelihood, C: LogLikelihood>(
        theta: Vec<f64>,
        fine: &F,
        coarse: Option<&C>,
    ) -> Result<Self> {
        let log_like_fine = fine.log_likelihood(&theta)?;
        let log_like_coarse = coarse.map(|c| c.log_likelihood(&theta)).transpose()?;
        Ok(Self {
            theta,
            log_like_fine,
            log_like_coarse,
            iteration: 0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Accepted,
    Rejected,
    /// Rejected by the coarse screen; no fine solve was made.
    ScreenedOut,
}

/// Generator for step `iteration` of the chain keyed by `chain_seed`.
pub fn step_rng(chain_seed: u64, iteration: u64) -> ChaCha8Rng {
    stream(chain_seed, iteration)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(EllipticError::Argument(format!(
            "beta = {beta} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `sqrt(1 - beta^2) theta + beta xi`, `xi ~ N(0, I)`.
pub fn pcn_propose<R: Rng + ?Sized>(theta: &[f64], beta: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let a = (1.0 - beta * beta).sqrt();
    Ok(theta
        .iter()
        .map(|&t| {
            let xi: f64 = rng.sample(StandardNormal);
            a * t + beta * xi
        })
        .collect())
}

fn accept(u: f64, delta: f64) -> bool {
    u.ln() < delta
}

/// One pCN Metropolis-Hastings step. The acceptance ratio is the likelihood
/// ratio alone because the proposal preserves the prior.
pub fn pcn_step<L: LogLikelihood, R: Rng + ?Sized>(
    state: &McmcState,
    model: &L,
    beta: f64,
    rng: &mut R,
) -> Result<(McmcState, StepOutcome)> {
    let proposal = pcn_propose(&state.theta, beta, rng)?;
    let u: f64 = rng.random();
    let ll = model.log_likelihood(&proposal)?;
    let mut next = state.clone();
    next.iteration += 1;
    if !accept(u, ll - state.log_like_fine) {
        return Ok((next, StepOutcome::Rejected));
    }
    next.theta = proposal;
    next.log_like_fine = ll;
    Ok((next, StepOutcome::Accepted))
}

/// One two-stage delayed-acceptance step. The fine likelihood is evaluated
/// only when the coarse screen promotes the proposal.
pub fn da_step<C: LogLikelihood, F: LogLikelihood, R: Rng + ?Sized>(
    state: &McmcState,
    coarse: &C,
    fine: &F,
    beta: f64,
    rng: &mut R,
) -> Result<(McmcState, StepOutcome)> {
    let lc = state.log_like_coarse.ok_or_else(|| {
        EllipticError::Argument("delayed acceptance needs a cached coarse likelihood".into())
    })?;
    let proposal = pcn_propose(&state.theta, beta, rng)?;
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();

    let mut next = state.clone();
    next.iteration += 1;

    let lc_new = coarse.log_likelihood(&proposal)?;
    let d_coarse = lc_new - lc;
    if !accept(u1, d_coarse) {
        return Ok((next, StepOutcome::ScreenedOut));
    }
    let lf_new = fine.log_likelihood(&proposal)?;
    if !accept(u2, (lf_new - state.log_like_fine) - d_coarse) {
        return Ok((next, StepOutcome::Rejected));
    }
    next.theta = proposal;
    next.log_like_fine = lf_new;
    next.log_like_coarse = Some(lc_new);
    Ok((next, StepOutcome::Accepted))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub iterations: u64,
    pub accepted: u64,
    /// Proposals that passed the coarse screen (all proposals for pCN).
    pub promoted: u64,
    pub fine_solves: u64,
    pub coarse_solves: u64,
}

impl RunStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.iterations as f64
    }

    fn record(&mut self, outcome: StepOutcome, screened: bool) {
        self.iterations += 1;
        if screened {
            self.coarse_solves += 1;
        }
        if outcome != StepOutcome::ScreenedOut {
            self.promoted += 1;
            self.fine_solves += 1;
        }
        if outcome == StepOutcome::Accepted {
            self.accepted += 1;
        }
    }
}

/// Run `n_iter` steps from `state`, calling `observe` after every step.
///
/// With `coarse = Some(..)` each step is a delayed-acceptance step,
/// otherwise plain pCN. A failing likelihood evaluation aborts the run with
/// the iteration at which it happened.
pub fn run_chain<F, C, O>(
    mut state: McmcState,
    fine: &F,
    coarse: Option<&C>,
    beta: f64,
    chain_seed: u64,
    n_iter: u64,
    mut observe: O,
) -> std::result::Result<(McmcState, RunStats), (u64, EllipticError)>
where
    F: LogLikelihood,
    C: LogLikelihood,
    O: FnMut(&McmcState, StepOutcome),
{
    let mut stats = RunStats::default();
    for _ in 0..n_iter {
        let t = state.iteration;
        let mut rng = step_rng(chain_seed, t);
        let (next, outcome) = match coarse {
            Some(c) => da_step(&state, c, fine, beta, &mut rng),
            None => pcn_step(&state, fine, beta, &mut rng),
        }
        .map_err(|e| (t, e))?;
        stats.record(outcome, coarse.is_some());
        state = next;
        observe(&state, outcome);
    }
    Ok((state, stats))
}
