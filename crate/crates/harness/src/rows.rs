//! Result rows, ensemble summaries and their CSV/JSON encodings.

use std::fmt::Write as _;

use ess_core::{mcse_ci, EstimateFlag, IactEstimate};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRow {
    pub method: String,
    pub replicate_id: usize,
    /// Per-chain sample count behind the estimate.
    pub checkpoint_n: usize,
    pub iact: f64,
    pub ess: f64,
    pub mcse: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub flags: Vec<EstimateFlag>,
}

/// Inputs to one row besides the estimate itself.
#[derive(Debug, Clone, Copy)]
pub struct RowContext {
    pub replicate_id: usize,
    pub checkpoint_n: usize,
    pub mean: f64,
    pub r0: f64,
    /// Samples behind the mean (all chains of a group).
    pub n_total: usize,
    pub alpha: f64,
    pub clamp: bool,
}

impl EstimatorRow {
    pub fn new(method: String, estimate: IactEstimate, ctx: RowContext) -> Self {
        let est = if ctx.clamp { estimate.clamped() } else { estimate };
        let ess = est.ess(ctx.checkpoint_n);
        let (mcse, ci_lo, ci_hi) = match mcse_ci(ctx.mean, est.iact, ctx.r0, ctx.n_total, ctx.alpha) {
            Ok(m) => (m.mcse, m.lo, m.hi),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        Self {
            method,
            replicate_id: ctx.replicate_id,
            checkpoint_n: ctx.checkpoint_n,
            iact: est.iact,
            ess,
            mcse,
            ci_lo,
            ci_hi,
            flags: est.flags,
        }
    }
}

/// Shortest round-trip-safe rendering: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn flag_name(f: EstimateFlag) -> &'static str {
    match f {
        EstimateFlag::NonPositive => "non_positive",
        EstimateFlag::FirstPairNonPositive => "first_pair_non_positive",
        EstimateFlag::Clamped => "clamped",
    }
}

pub const ROW_HEADER: &str = "method,replicate_id,checkpoint_n,iact,ess,mcse,ci_lo,ci_hi,flags";

pub fn rows_to_csv(rows: &[EstimatorRow]) -> String {
    let mut out = String::from(ROW_HEADER);
    out.push('\n');
    for r in rows {
        let flags: Vec<&str> = r.flags.iter().map(|&f| flag_name(f)).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.method,
            r.replicate_id,
            r.checkpoint_n,
            fmt_f64(r.iact),
            fmt_f64(r.ess),
            fmt_f64(r.mcse),
            fmt_f64(r.ci_lo),
            fmt_f64(r.ci_hi),
            flags.join(";")
        );
    }
    out
}

/// Distribution of one quantity across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub sd: f64,
    pub p5: f64,
    pub p95: f64,
    pub min: f64,
    pub max: f64,
}

/// Linear-interpolation percentile (the common "type 7" rule) of sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Spread {
    /// Over the finite values only; `None` when there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let sd = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            mean,
            sd,
            p5: percentile(&v, 0.05),
            p95: percentile(&v, 0.95),
            min: v[0],
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub checkpoint_n: usize,
    /// Rows with a finite estimate.
    pub n_valid: usize,
    pub iact: Spread,
    pub ess: Spread,
}

/// Per (method, checkpoint) spread of IACT and ESS, in order of first
/// appearance in `rows`.
pub fn summarize(rows: &[EstimatorRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in rows {
        let k = (r.method.clone(), r.checkpoint_n);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .filter_map(|(method, checkpoint_n)| {
            let sel: Vec<&EstimatorRow> = rows
                .iter()
                .filter(|r| r.method == method && r.checkpoint_n == checkpoint_n)
                .collect();
            let valid: Vec<&&EstimatorRow> = sel
                .iter()
                .filter(|r| r.iact.is_finite() && r.iact > 0.0)
                .collect();
            Some(SummaryRow {
                n_valid: valid.len(),
                iact: Spread::of(valid.iter().map(|r| r.iact))?,
                ess: Spread::of(valid.iter().map(|r| r.ess))?,
                method,
                checkpoint_n,
            })
        })
        .collect()
}

pub const SUMMARY_HEADER: &str = "method,checkpoint_n,n_valid,\
iact_mean,iact_sd,iact_p5,iact_p95,iact_min,iact_max,\
ess_mean,ess_sd,ess_p5,ess_p95,ess_min,ess_max";

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let cols: Vec<String> = [r.iact, r.ess]
            .iter()
            .flat_map(|s| [s.mean, s.sd, s.p5, s.p95, s.min, s.max])
            .map(fmt_f64)
            .collect();
        let _ = writeln!(out, "{},{},{},{}", r.method, r.checkpoint_n, r.n_valid, cols.join(","));
    }
    out
}
