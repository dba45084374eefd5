//! Post-hoc analysis of chain files.

use std::path::{Path, PathBuf};

use ess_core::{mcse_ci, mean_and_var, psrf, ChainSet, PsrfReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_io::read_chains;
use crate::config::{AnalysisMode, ExperimentConfig};
use crate::ensemble::{compute_rows, replicate_rows, write_ensemble, EnsembleResult, MemorySource};
use crate::error::{io_err, HarnessError, Result};
use crate::estimators::estimate_group;
use crate::output::{write_json, write_metadata, write_text, OutputFormat};
use crate::rows::{fmt_f64, rows_to_csv, EstimatorRow, RowContext};

/// One method's result over a set of chains of the same sampler, with the
/// per-chain IACT estimates averaged and all retained samples pooled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledRow {
    pub method: String,
    pub n_chains: usize,
    pub checkpoint_n: usize,
    pub n_total: usize,
    pub mean: f64,
    pub r0: f64,
    pub iact_avg: f64,
    pub iact_min: f64,
    pub iact_max: f64,
    pub ess_total: f64,
    pub mcse: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl PooledRow {
    /// `ess_total = n_total / iact_avg`, `mcse = sqrt(iact_avg r0 / n_total)`.
    pub fn from_iacts(
        method: String,
        iacts: &[f64],
        mean: f64,
        r0: f64,
        n_total: usize,
        checkpoint_n: usize,
        alpha: f64,
    ) -> Self {
        let avg = iacts.iter().sum::<f64>() / iacts.len() as f64;
        let min = iacts.iter().copied().fold(f64::INFINITY, f64::min);
        let max = iacts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mcse, ci_lo, ci_hi) = match mcse_ci(mean, avg, r0, n_total, alpha) {
            Ok(m) => (m.mcse, m.lo, m.hi),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        Self {
            method,
            n_chains: iacts.len(),
            checkpoint_n,
            n_total,
            mean,
            r0,
            iact_avg: avg,
            iact_min: min,
            iact_max: max,
            ess_total: n_total as f64 / avg,
            mcse,
            ci_lo,
            ci_hi,
        }
    }
}

pub const POOLED_HEADER: &str = "method,n_chains,checkpoint_n,n_total,mean,r0,\
iact_avg,iact_min,iact_max,ess_total,mcse,ci_lo,ci_hi";

pub fn pooled_to_csv(rows: &[PooledRow]) -> String {
    let mut out = format!("{POOLED_HEADER}\n");
    for r in rows {
        let nums = [
            r.mean, r.r0, r.iact_avg, r.iact_min, r.iact_max, r.ess_total, r.mcse, r.ci_lo, r.ci_hi,
        ]
        .map(fmt_f64)
        .join(",");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.method, r.n_chains, r.checkpoint_n, r.n_total, nums
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsrfRow {
    pub checkpoint_n: usize,
    #[serde(flatten)]
    pub report: PsrfReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledAnalysis {
    /// Per-chain rows; grouped ESS-Bulk rows use `replicate_id` 0.
    pub rows: Vec<EstimatorRow>,
    /// At every checkpoint.
    pub table: Vec<PooledRow>,
    pub psrf: Vec<PsrfRow>,
    /// `running_means[k][c]`: mean of chain `c` at checkpoint `k`.
    pub running_means: Vec<Vec<f64>>,
}

/// Pooled analysis of the chains of one sampler.
pub fn analyze_pooled(cfg: &ExperimentConfig, chains: Vec<Vec<f64>>) -> Result<PooledAnalysis> {
    let n_chains = chains.len();
    let src = MemorySource(chains);
    let needed = cfg.burn_in + cfg.checkpoints.iter().max().copied().unwrap_or(0);
    let len = src.0.first().map_or(0, Vec::len);
    if n_chains == 0 || len < needed {
        return Err(HarnessError::Config(format!(
            "{n_chains} chains of {len} samples; burn-in plus the last checkpoint need {needed}"
        )));
    }
    let mut keyed: Vec<_> = (0..n_chains)
        .into_par_iter()
        .map(|c| replicate_rows(cfg, &src, c))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut table = Vec::new();
    let mut psrf_rows = Vec::new();
    let mut running_means = Vec::new();
    for (ci, &c) in cfg.checkpoints.iter().enumerate() {
        let kept: Vec<&[f64]> = src.0.iter().map(|x| &x[cfg.burn_in..cfg.burn_in + c]).collect();
        let pooled: Vec<f64> = kept.iter().flat_map(|x| x.iter().copied()).collect();
        let (mean, r0) = mean_and_var(&pooled)?;
        let n_total = pooled.len();
        running_means.push(
            kept.iter()
                .map(|x| mean_and_var(x).map(|(m, _)| m))
                .collect::<std::result::Result<Vec<_>, _>>()?,
        );
        if n_chains >= 2 {
            let set = ChainSet::from_vecs(kept.iter().map(|x| x.to_vec()).collect())?;
            psrf_rows.push(PsrfRow {
                checkpoint_n: c,
                report: psrf(&set)?,
            });
        }

        for (mi, entry) in cfg.estimators.iter().enumerate() {
            let label = entry.label();
            let iacts: Vec<f64> = match entry.spec.bulk_variant().filter(|v| v.is_grouped()) {
                Some(variant) => {
                    let start = variant.options(cfg.burn_in).burn_in;
                    let end = cfg.burn_in + c;
                    let cut: Vec<Vec<f64>> = src.0.iter().map(|x| x[start..end].to_vec()).collect();
                    let report = estimate_group(&entry.spec, cut)?;
                    let ctx = RowContext {
                        replicate_id: 0,
                        checkpoint_n: end - start,
                        mean,
                        r0,
                        n_total,
                        alpha: cfg.output.alpha,
                        clamp: cfg.output.clamp_iact,
                    };
                    let row = EstimatorRow::new(label.clone(), report.iact, ctx);
                    let iact = row.iact;
                    keyed.push(((0, ci, mi), row));
                    vec![iact]
                }
                None => keyed
                    .iter()
                    .filter(|((_, k, m), _)| *k == ci && *m == mi)
                    .map(|(_, r)| r.iact)
                    .collect(),
            };
            table.push(PooledRow::from_iacts(label, &iacts, mean, r0, n_total, c, cfg.output.alpha));
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    Ok(PooledAnalysis {
        rows: keyed.into_iter().map(|(_, r)| r).collect(),
        table,
        psrf: psrf_rows,
        running_means,
    })
}

fn psrf_to_csv(rows: &[PsrfRow]) -> String {
    let mut out = String::from("checkpoint_n,b,w,var_hat,rhat\n");
    for r in rows {
        let p = r.report;
        out.push_str(&format!(
            "{},{}\n",
            r.checkpoint_n,
            [p.b, p.w, p.var_hat, p.rhat].map(fmt_f64).join(",")
        ));
    }
    out
}

fn running_means_to_csv(checkpoints: &[usize], means: &[Vec<f64>]) -> String {
    let width = means.first().map_or(0, Vec::len);
    let mut out = String::from("checkpoint_n");
    for c in 0..width {
        out.push_str(&format!(",chain_{c}"));
    }
    out.push('\n');
    for (c, row) in checkpoints.iter().zip(means) {
        out.push_str(&c.to_string());
        for v in row {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

fn write_pooled(dir: &Path, stem: &str, cfg: &ExperimentConfig, a: &PooledAnalysis, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            write_text(&dir.join(format!("{stem}_rows.csv")), &rows_to_csv(&a.rows))?;
            write_text(&dir.join(format!("{stem}_table.csv")), &pooled_to_csv(&a.table))?;
        }
        OutputFormat::Json => {
            write_json(&dir.join(format!("{stem}_rows.json")), &a.rows)?;
            write_json(&dir.join(format!("{stem}_table.json")), &a.table)?;
        }
    }
    if !a.psrf.is_empty() {
        write_text(&dir.join(format!("{stem}_psrf.csv")), &psrf_to_csv(&a.psrf))?;
    }
    write_text(
        &dir.join(format!("{stem}_running_means.csv")),
        &running_means_to_csv(&cfg.checkpoints, &a.running_means),
    )
}

#[derive(Debug, Clone)]
pub enum AnalysisOutput {
    Pooled(Vec<(String, PooledAnalysis)>),
    Ensemble(EnsembleResult),
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chains".into())
}

/// Analyse chain files according to `cfg.analysis_mode` and write results
/// into `dir`. Ensemble mode takes exactly one file and writes the same
/// files as the AR(1) ensemble.
pub fn analyze(cfg: &ExperimentConfig, inputs: &[PathBuf], dir: &Path, format: OutputFormat) -> Result<AnalysisOutput> {
    if inputs.is_empty() {
        return Err(HarnessError::Config("no chain files given".into()));
    }
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    let out = match cfg.analysis_mode {
        AnalysisMode::Ensemble => {
            if inputs.len() != 1 {
                return Err(HarnessError::Config(
                    "ensemble analysis takes exactly one chain file".into(),
                ));
            }
            let src = MemorySource(read_chains(&inputs[0])?);
            let result = compute_rows(cfg, &src)?;
            write_ensemble(dir, format, &result)?;
            AnalysisOutput::Ensemble(result)
        }
        AnalysisMode::Pooled => {
            let mut all = Vec::new();
            for path in inputs {
                let s = stem(path);
                let a = analyze_pooled(cfg, read_chains(path)?)?;
                write_pooled(dir, &s, cfg, &a, format)?;
                all.push((s, a));
            }
            AnalysisOutput::Pooled(all)
        }
    };
    write_metadata(dir, cfg, "analyze", &files)?;
    Ok(out)
}
