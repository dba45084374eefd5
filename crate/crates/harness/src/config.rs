//! JSON experiment configuration.

use std::path::Path;

use ess_core::{ar1_coeff_for_iact, Ar1Init, Ar1Params};
use ess_elliptic::{ModelConfig, DEFAULT_BETA};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};
use crate::estimators::EstimatorEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ar1Ensemble,
    EllipticRun,
    Analyze,
}

/// How `analyze` treats the chains of a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisMode {
    /// Chains are runs of one sampler on one target: per-chain estimates are
    /// averaged and the samples pooled.
    #[default]
    Pooled,
    /// Chains are independent replicates: one row per replicate, as produced
    /// by the AR(1) ensemble.
    Ensemble,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ar1Section {
    /// Target IACT; alternative to giving `a` directly.
    #[serde(default)]
    pub iact: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub mu_eps: f64,
    #[serde(default = "one")]
    pub sigma_eps: f64,
    #[serde(default = "default_init")]
    pub init: Ar1Init,
}

fn one() -> f64 {
    1.0
}

fn default_init() -> Ar1Init {
    Ar1Init::Fixed(0.0)
}

impl Ar1Section {
    pub fn params(&self) -> Result<Ar1Params> {
        let a = match (self.a, self.iact) {
            (Some(a), None) => a,
            (None, Some(t)) => ar1_coeff_for_iact(t)?,
            _ => {
                return Err(HarnessError::Config(
                    "ar1 needs exactly one of `a` and `iact`".into(),
                ))
            }
        };
        Ok(Ar1Params::new(a, self.mu_eps, self.sigma_eps)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStart {
    /// `theta_0 ~ N(0, I)`, one draw per chain.
    #[default]
    PriorDraw,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcSection {
    pub beta: f64,
    pub delayed_acceptance: bool,
    /// True coefficients for synthetic data; drawn from the prior with
    /// `truth_seed` when absent.
    pub theta_star: Option<Vec<f64>>,
    pub truth_seed: u64,
    pub noise_seed: u64,
    pub add_noise: bool,
    /// Points whose log-permeability is recorded every iteration.
    pub probes: Vec<[f64; 2]>,
    pub start: ChainStart,
}

impl Default for McmcSection {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            delayed_acceptance: false,
            theta_star: None,
            truth_seed: 1,
            noise_seed: 2,
            add_noise: true,
            probes: vec![[0.03125, 0.03125], [0.65625, 0.90625]],
            start: ChainStart::PriorDraw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    pub write_chains: bool,
    /// Replace non-positive IACT estimates by 1 (flagged) before deriving
    /// ESS and MCSE.
    pub clamp_iact: bool,
    /// Interval level is `1 - alpha`.
    pub alpha: f64,
    /// Chains per ESS-Bulk bootstrap group.
    pub group_size: usize,
    pub write_grids: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            write_chains: true,
            clamp_iact: false,
            alpha: 0.05,
            group_size: 4,
            write_grids: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub master_seed: u64,
    /// AR(1) replicates, or MCMC chains for an elliptic run.
    pub n_replicates: usize,
    /// Samples per chain, burn-in included.
    pub chain_length: usize,
    #[serde(default)]
    pub burn_in: usize,
    /// Post-burn-in sample counts at which every estimator is evaluated.
    pub checkpoints: Vec<usize>,
    #[serde(default)]
    pub estimators: Vec<EstimatorEntry>,
    #[serde(default)]
    pub ar1: Option<Ar1Section>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub mcmc: Option<McmcSection>,
    #[serde(default)]
    pub analysis_mode: AnalysisMode,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.burn_in >= self.chain_length {
            return bad(format!(
                "burn_in {} must be below chain_length {}",
                self.burn_in, self.chain_length
            ));
        }
        if self.checkpoints.is_empty() {
            return bad("at least one checkpoint is required".into());
        }
        let room = self.chain_length - self.burn_in;
        if let Some(&c) = self.checkpoints.iter().find(|&&c| c == 0 || c > room) {
            return bad(format!("checkpoint {c} outside 1..={room}"));
        }
        if self.n_replicates == 0 {
            return bad("n_replicates must be positive".into());
        }
        if !(self.output.alpha > 0.0 && self.output.alpha < 1.0) {
            return bad(format!("alpha = {} outside (0, 1)", self.output.alpha));
        }
        let mut labels: Vec<String> = self.estimators.iter().map(|e| e.label()).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("duplicate estimator label {:?}", w[0]));
        }
        if let Some(l) = labels.iter().find(|l| l.contains([',', '\n', '"'])) {
            return bad(format!("estimator label {l:?} contains a CSV delimiter"));
        }
        let grouped = self.estimators.iter().any(|e| e.spec.is_grouped());
        if grouped && self.output.group_size > self.n_replicates {
            return bad(format!(
                "group_size {} exceeds n_replicates {}",
                self.output.group_size, self.n_replicates
            ));
        }
        match self.kind {
            ExperimentKind::Ar1Ensemble => {
                self.ar1_section()?.params()?;
            }
            ExperimentKind::EllipticRun => {
                let beta = self.mcmc_section().beta;
                if !(0.0..=1.0).contains(&beta) {
                    return bad(format!("beta = {beta} outside [0, 1]"));
                }
            }
            ExperimentKind::Analyze => {}
        }
        Ok(())
    }

    pub fn ar1_section(&self) -> Result<&Ar1Section> {
        self.ar1
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing `ar1` section".into()))
    }

    pub fn model_config(&self) -> ModelConfig {
        self.model.clone().unwrap_or_default()
    }

    pub fn mcmc_section(&self) -> McmcSection {
        self.mcmc.clone().unwrap_or_default()
    }
}
