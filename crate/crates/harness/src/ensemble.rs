//! Replicate ensembles: every configured estimator at every checkpoint of
//! every replicate, plus ESS-Bulk on bootstrap groups of replicates.

use std::path::Path;

use ess_core::rng::{derive_seed, stream};
use ess_core::{ar1_simulate, mean_and_var, Ar1Init, Ar1Params};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::estimators::{estimate_group, estimate_single, Prepared};
use crate::output::{write_json, write_text, OutputFormat};
use crate::rows::{rows_to_csv, summarize, summary_to_csv, EstimatorRow, RowContext, SummaryRow};

/// Stream index reserved for drawing bootstrap groups.
const GROUP_STREAM: u64 = 0x4752_4f55_5053;

/// Random access to the chains of an ensemble.
pub trait ChainSource: Sync {
    fn n_chains(&self) -> usize;
    fn chain_len(&self) -> usize;
    fn chain(&self, index: usize) -> Result<Vec<f64>>;
}

/// AR(1) replicates regenerated on demand from their derived seeds.
pub struct Ar1Source {
    pub params: Ar1Params,
    pub init: Ar1Init,
    pub n_chains: usize,
    pub chain_len: usize,
    pub master_seed: u64,
}

impl Ar1Source {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let sec = cfg.ar1_section()?;
        Ok(Self {
            params: sec.params()?,
            init: sec.init,
            n_chains: cfg.n_replicates,
            chain_len: cfg.chain_length,
            master_seed: cfg.master_seed,
        })
    }
}

impl ChainSource for Ar1Source {
    fn n_chains(&self) -> usize {
        self.n_chains
    }

    fn chain_len(&self) -> usize {
        self.chain_len
    }

    fn chain(&self, index: usize) -> Result<Vec<f64>> {
        let seed = derive_seed(self.master_seed, index as u64);
        Ok(ar1_simulate(&self.params, self.chain_len, seed, self.init)?.into_samples())
    }
}

/// Chains already in memory, e.g. read from a chain file.
pub struct MemorySource(pub Vec<Vec<f64>>);

impl ChainSource for MemorySource {
    fn n_chains(&self) -> usize {
        self.0.len()
    }

    fn chain_len(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    fn chain(&self, index: usize) -> Result<Vec<f64>> {
        Ok(self.0[index].clone())
    }
}

/// `n_groups` groups of `size` distinct chain indices out of `n_chains`.
/// Draws are independent across groups, so groups may repeat.
pub fn bootstrap_groups(master_seed: u64, n_groups: usize, n_chains: usize, size: usize) -> Vec<Vec<usize>> {
    let base = derive_seed(master_seed, GROUP_STREAM);
    (0..n_groups)
        .map(|g| {
            let mut rng = stream(base, g as u64);
            rand::seq::index::sample(&mut rng, n_chains, size).into_vec()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub rows: Vec<EstimatorRow>,
    pub summary: Vec<SummaryRow>,
    pub groups: Vec<Vec<usize>>,
}

pub(crate) type Keyed = ((usize, usize, usize), EstimatorRow);

pub(crate) fn replicate_rows(cfg: &ExperimentConfig, src: &dyn ChainSource, r: usize) -> Result<Vec<Keyed>> {
    let chain = src.chain(r)?;
    let mut out = Vec::new();
    for (ci, &c) in cfg.checkpoints.iter().enumerate() {
        let x = &chain[cfg.burn_in..cfg.burn_in + c];
        let prep = Prepared::new(x)?;
        for (mi, entry) in cfg.estimators.iter().enumerate() {
            if entry.spec.is_grouped() {
                continue;
            }
            let est = estimate_single(&entry.spec, &prep)?;
            let ctx = RowContext {
                replicate_id: r,
                checkpoint_n: c,
                mean: prep.mean,
                r0: prep.r0,
                n_total: c,
                alpha: cfg.output.alpha,
                clamp: cfg.output.clamp_iact,
            };
            out.push(((r, ci, mi), EstimatorRow::new(entry.label(), est, ctx)));
        }
    }
    Ok(out)
}

fn group_rows(
    cfg: &ExperimentConfig,
    src: &dyn ChainSource,
    g: usize,
    members: &[usize],
) -> Result<Vec<Keyed>> {
    let chains = members
        .iter()
        .map(|&m| src.chain(m))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (ci, &c) in cfg.checkpoints.iter().enumerate() {
        for (mi, entry) in cfg.estimators.iter().enumerate() {
            let Some(variant) = entry.spec.bulk_variant().filter(|v| v.is_grouped()) else {
                continue;
            };
            let start = variant.options(cfg.burn_in).burn_in;
            let end = cfg.burn_in + c;
            let cut: Vec<Vec<f64>> = chains.iter().map(|x| x[start..end].to_vec()).collect();
            let pooled: Vec<f64> = cut.iter().flatten().copied().collect();
            let (mean, r0) = mean_and_var(&pooled)?;
            let report = estimate_group(&entry.spec, cut)?;
            let ctx = RowContext {
                replicate_id: g,
                checkpoint_n: end - start,
                mean,
                r0,
                n_total: pooled.len(),
                alpha: cfg.output.alpha,
                clamp: cfg.output.clamp_iact,
            };
            out.push(((g, ci, mi), EstimatorRow::new(entry.label(), report.iact, ctx)));
        }
    }
    Ok(out)
}

/// Rows ordered by (replicate, checkpoint, estimator), independent of how
/// the work was scheduled.
pub fn compute_rows(cfg: &ExperimentConfig, src: &dyn ChainSource) -> Result<EnsembleResult> {
    let n = src.n_chains();
    let needed = cfg.burn_in + cfg.checkpoints.iter().max().copied().unwrap_or(0);
    if src.chain_len() < needed {
        return Err(HarnessError::Config(format!(
            "chains hold {} samples but burn-in plus the last checkpoint need {needed}",
            src.chain_len()
        )));
    }
    let mut keyed: Vec<Keyed> = (0..n)
        .into_par_iter()
        .map(|r| replicate_rows(cfg, src, r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let grouped = cfg.estimators.iter().any(|e| e.spec.is_grouped());
    let groups = if grouped {
        let size = cfg.output.group_size;
        if size > n {
            return Err(HarnessError::Config(format!(
                "group_size {size} exceeds the {n} available chains"
            )));
        }
        bootstrap_groups(cfg.master_seed, n, n, size)
    } else {
        Vec::new()
    };
    let group_keyed: Vec<Keyed> = groups
        .par_iter()
        .enumerate()
        .map(|(g, members)| group_rows(cfg, src, g, members))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    keyed.extend(group_keyed);
    keyed.sort_by_key(|(k, _)| *k);

    let rows: Vec<EstimatorRow> = keyed.into_iter().map(|(_, r)| r).collect();
    let summary = summarize(&rows);
    Ok(EnsembleResult {
        rows,
        summary,
        groups,
    })
}

pub fn groups_to_csv(groups: &[Vec<usize>]) -> String {
    let width = groups.first().map_or(0, Vec::len);
    let mut out = String::from("group_id");
    for k in 0..width {
        out.push_str(&format!(",chain_{k}"));
    }
    out.push('\n');
    for (g, members) in groups.iter().enumerate() {
        out.push_str(&g.to_string());
        for m in members {
            out.push_str(&format!(",{m}"));
        }
        out.push('\n');
    }
    out
}

pub fn write_ensemble(dir: &Path, format: OutputFormat, result: &EnsembleResult) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            write_text(&dir.join("rows.csv"), &rows_to_csv(&result.rows))?;
            write_text(&dir.join("summary.csv"), &summary_to_csv(&result.summary))?;
        }
        OutputFormat::Json => {
            write_json(&dir.join("rows.json"), &result.rows)?;
            write_json(&dir.join("summary.json"), &result.summary)?;
        }
    }
    if !result.groups.is_empty() {
        write_text(&dir.join("groups.csv"), &groups_to_csv(&result.groups))?;
    }
    Ok(())
}

/// Generate the AR(1) ensemble, evaluate it and write all outputs to `dir`.
pub fn run_ar1_ensemble(cfg: &ExperimentConfig, dir: &Path, format: OutputFormat) -> Result<EnsembleResult> {
    let src = Ar1Source::from_config(cfg)?;
    let result = compute_rows(cfg, &src)?;
    std::fs::create_dir_all(dir).map_err(crate::error::io_err(dir))?;
    write_ensemble(dir, format, &result)?;
    if cfg.output.write_chains {
        let path = dir.join("chains.essc");
        let mut w = crate::chain_io::ChainWriter::create(&path, src.n_chains as u32, src.chain_len as u64)?;
        for r in 0..src.n_chains {
            w.push(&src.chain(r)?)?;
        }
        w.finish()?;
    }
    crate::output::write_metadata(dir, cfg, "ar1", &result.rows.len())?;
    Ok(result)
}
