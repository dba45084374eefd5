//! Synthetic data and parallel pCN / delayed-acceptance runs for the Darcy
//! inverse problem.

use std::path::Path;

use ess_core::rng::{derive_seed, stream};
use ess_elliptic::{run_chain, synthesize_data, EllipticModel, McmcState, RunStats};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_io::write_chains;
use crate::config::{ChainStart, ExperimentConfig};
use crate::error::{io_err, HarnessError, Result};
use crate::output::{grid_to_csv, write_json, write_metadata, write_text};

/// Stream index of a chain's initial state, disjoint from the step streams.
const START_STREAM: u64 = u64::MAX;

fn normals(seed: u64, index: u64, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, index);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticData {
    pub theta_star: Vec<f64>,
    pub obs_cells: Vec<usize>,
    pub data: Vec<f64>,
    pub noise_var: f64,
    pub add_noise: bool,
    pub noise_seed: u64,
}

impl SyntheticData {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Fine model without data plus the synthetic observations for it.
pub fn synthesize(cfg: &ExperimentConfig) -> Result<(EllipticModel, SyntheticData)> {
    let model = cfg.model_config().build()?;
    let mcmc = cfg.mcmc_section();
    let m = model.n_params();
    let theta_star = match mcmc.theta_star {
        Some(t) if t.len() == m => t,
        Some(t) => {
            return Err(HarnessError::Config(format!(
                "theta_star has {} entries, the model has {m} modes",
                t.len()
            )))
        }
        None => normals(mcmc.truth_seed, 0, m),
    };
    let data = synthesize_data(&model, &theta_star, mcmc.noise_seed, mcmc.add_noise)?;
    let synth = SyntheticData {
        theta_star,
        obs_cells: model.obs_cells.clone(),
        data,
        noise_var: model.noise_var,
        add_noise: mcmc.add_noise,
        noise_seed: mcmc.noise_seed,
    };
    Ok((model, synth))
}

fn attach(model: EllipticModel, synth: &SyntheticData) -> Result<EllipticModel> {
    if synth.obs_cells != model.obs_cells {
        return Err(HarnessError::Config(
            "synthetic data was generated on a different observation grid".into(),
        ));
    }
    Ok(model.with_data(synth.data.clone())?)
}

/// Write `synthetic.json` and, if enabled, the true log-permeability and
/// pressure grids.
pub fn write_synthetic(cfg: &ExperimentConfig, dir: &Path) -> Result<SyntheticData> {
    let (model, synth) = synthesize(cfg)?;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_json(&dir.join("synthetic.json"), &synth)?;
    if cfg.output.write_grids {
        let nx = model.grid.nx;
        write_text(&dir.join("eta_true.csv"), &grid_to_csv(&model.eta(&synth.theta_star)?, nx))?;
        let p = model.forward(&synth.theta_star)?.pressure;
        write_text(&dir.join("pressure_true.csv"), &grid_to_csv(&p, nx))?;
    }
    Ok(synth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub x: f64,
    pub y: f64,
    pub cell: usize,
    /// `sqrt(lambda_i) phi_i(cell)`: the probe value is `weights . theta`.
    pub weights: Vec<f64>,
}

impl Probe {
    pub fn new(model: &EllipticModel, x: f64, y: f64) -> Result<Self> {
        let cell = model.grid.cell_at(x, y)?;
        let weights = model
            .basis
            .eigenvalues
            .iter()
            .zip(&model.basis.eigenvectors)
            .map(|(l, phi)| l.max(0.0).sqrt() * phi[cell])
            .collect();
        Ok(Self { x, y, cell, weights })
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.weights.iter().zip(theta).map(|(w, t)| w * t).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub chain: usize,
    pub seed: u64,
    pub stats: RunStats,
    pub acceptance_rate: f64,
    pub final_theta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ChainTrace {
    /// `theta[k][t]`: coefficient `k` after step `t + 1`.
    pub theta: Vec<Vec<f64>>,
    /// `probes[p][t]`: log-permeability at probe `p` after step `t + 1`.
    pub probes: Vec<Vec<f64>>,
    pub summary: ChainSummary,
}

#[derive(Debug, Clone)]
pub struct EllipticOutput {
    pub chains: Vec<ChainTrace>,
    pub probes: Vec<Probe>,
    pub synthetic: SyntheticData,
}

fn initial_theta(start: ChainStart, seed: u64, m: usize) -> Vec<f64> {
    match start {
        ChainStart::PriorDraw => normals(seed, START_STREAM, m),
        ChainStart::Zero => vec![0.0; m],
    }
}

fn run_one(
    c: usize,
    cfg: &ExperimentConfig,
    fine: &EllipticModel,
    coarse: Option<&EllipticModel>,
    probes: &[Probe],
) -> Result<ChainTrace> {
    let mcmc = cfg.mcmc_section();
    let m = fine.n_params();
    let n = cfg.chain_length;
    let seed = derive_seed(cfg.master_seed, c as u64);
    let state = McmcState::new(initial_theta(mcmc.start, seed, m), fine, coarse).map_err(|e| {
        HarnessError::Mcmc {
            chain: c,
            iteration: 0,
            source: e,
        }
    })?;
    let mut theta = vec![Vec::with_capacity(n); m];
    let mut probe_tr = vec![Vec::with_capacity(n); probes.len()];
    let (end, stats) = run_chain(state, fine, coarse, mcmc.beta, seed, n as u64, |s, _| {
        for (tr, v) in theta.iter_mut().zip(&s.theta) {
            tr.push(*v);
        }
        for (tr, p) in probe_tr.iter_mut().zip(probes) {
            tr.push(p.value(&s.theta));
        }
    })
    .map_err(|(iteration, source)| HarnessError::Mcmc {
        chain: c,
        iteration,
        source,
    })?;
    Ok(ChainTrace {
        theta,
        probes: probe_tr,
        summary: ChainSummary {
            chain: c,
            seed,
            stats,
            acceptance_rate: stats.acceptance_rate(),
            final_theta: end.theta,
        },
    })
}

/// Run `n_replicates` independent chains of `chain_length` steps each.
/// `synthetic` overrides the data the config would generate.
pub fn run_chains(cfg: &ExperimentConfig, synthetic: Option<SyntheticData>) -> Result<EllipticOutput> {
    let (model, generated) = synthesize(cfg)?;
    let synth = synthetic.unwrap_or(generated);
    let fine = attach(model, &synth)?;
    let mcmc = cfg.mcmc_section();
    let coarse = if mcmc.delayed_acceptance {
        Some(fine.coarse_model(cfg.model_config().coarsen)?)
    } else {
        None
    };
    let probes = mcmc
        .probes
        .iter()
        .map(|&[x, y]| Probe::new(&fine, x, y))
        .collect::<Result<Vec<_>>>()?;
    let chains = (0..cfg.n_replicates)
        .into_par_iter()
        .map(|c| run_one(c, cfg, &fine, coarse.as_ref(), &probes))
        .collect::<Result<Vec<_>>>()?;
    Ok(EllipticOutput {
        chains,
        probes,
        synthetic: synth,
    })
}

#[derive(Serialize)]
struct RunStatsFile<'a> {
    delayed_acceptance: bool,
    beta: f64,
    totals: RunStats,
    chains: Vec<&'a ChainSummary>,
    probes: &'a [Probe],
}

/// Run the chains and write `theta.essc` (chain `c`, coefficient `k` at
/// index `c * m + k`), one `eta_probe_{p}.essc` per probe, `run_stats.json`
/// and `synthetic.json`.
pub fn run_elliptic(cfg: &ExperimentConfig, dir: &Path, synthetic: Option<SyntheticData>) -> Result<EllipticOutput> {
    let out = run_chains(cfg, synthetic)?;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_json(&dir.join("synthetic.json"), &out.synthetic)?;
    if cfg.output.write_chains {
        let theta: Vec<Vec<f64>> = out.chains.iter().flat_map(|c| c.theta.iter().cloned()).collect();
        write_chains(&dir.join("theta.essc"), &theta)?;
    }
    for p in 0..out.probes.len() {
        let series: Vec<Vec<f64>> = out.chains.iter().map(|c| c.probes[p].clone()).collect();
        write_chains(&dir.join(format!("eta_probe_{p}.essc")), &series)?;
    }
    let mut totals = RunStats::default();
    for c in &out.chains {
        let s = c.summary.stats;
        totals.iterations += s.iterations;
        totals.accepted += s.accepted;
        totals.promoted += s.promoted;
        totals.fine_solves += s.fine_solves;
        totals.coarse_solves += s.coarse_solves;
    }
    let mcmc = cfg.mcmc_section();
    write_json(
        &dir.join("run_stats.json"),
        &RunStatsFile {
            delayed_acceptance: mcmc.delayed_acceptance,
            beta: mcmc.beta,
            totals,
            chains: out.chains.iter().map(|c| &c.summary).collect(),
            probes: &out.probes,
        },
    )?;
    write_metadata(dir, cfg, "elliptic run", &out.probes.len())?;
    Ok(out)
}
