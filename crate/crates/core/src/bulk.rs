//! Potential scale reduction, rank normalisation and the combined
//! multi-chain ("bulk") ESS.
//!
//! The bulk pipeline runs in this order: drop burn-in, split each chain in
//! half, rank-normalise the pooled draws, compute per-chain autocorrelations
//! by FFT, combine them with the PSRF into a single autocorrelation sequence
//! and truncate that with the initial monotone rule.

use serde::{Deserialize, Serialize};

use crate::chain::{autocov_fft, mean_and_var, Chain, ChainSet};
use crate::error::{EssError, Result};
use crate::estimate::{EstimateFlag, EstimatorParams, IactEstimate, Method};
use crate::geyer::{initial_sequence, pair_sums, GeyerVariant};
use crate::normal::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsrfReport {
    /// Between-sequence variance.
    pub b: f64,
    /// Within-sequence variance.
    pub w: f64,
    pub var_hat: f64,
    pub rhat: f64,
}

impl PsrfReport {
    fn from_bw(b: f64, w: f64, n: usize) -> Self {
        let nf = n as f64;
        let var_hat = (nf - 1.0) / nf * w + b / nf;
        Self {
            b,
            w,
            var_hat,
            rhat: (var_hat / w).sqrt(),
        }
    }
}

fn within_variances(chains: &[Chain]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut means = Vec::with_capacity(chains.len());
    let mut s2 = Vec::with_capacity(chains.len());
    for c in chains {
        let (m, r0) = mean_and_var(c.samples())?;
        let n = c.len() as f64;
        means.push(m);
        s2.push(r0 * n / (n - 1.0));
    }
    Ok((means, s2))
}

/// Potential scale reduction factor of `M >= 2` equal-length chains.
///
/// ```text
/// B = N/(M-1) sum_j (mean_j - mean)^2
/// W = (1/M) sum_j s2_j,   s2_j = 1/(N-1) sum_i (x_ij - mean_j)^2
/// var_hat = (N-1)/N W + B/N,   rhat = sqrt(var_hat / W)
/// ```
pub fn psrf(set: &ChainSet) -> Result<PsrfReport> {
    let m = set.n_chains();
    let n = set.common_length();
    if m < 2 {
        return Err(EssError::Argument("PSRF needs at least two chains".into()));
    }
    if n < 2 {
        return Err(EssError::TooShort { len: n, min: 2 });
    }
    let (means, s2) = within_variances(set.chains())?;
    let grand = means.iter().sum::<f64>() / m as f64;
    let b = n as f64 / (m - 1) as f64 * means.iter().map(|v| (v - grand) * (v - grand)).sum::<f64>();
    let w = s2.iter().sum::<f64>() / m as f64;
    if w <= 0.0 {
        return Err(EssError::ConstantChains);
    }
    Ok(PsrfReport::from_bw(b, w, n))
}

/// Offset convention for fractional ranks `(r - 3/8) / (S + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankOffset {
    /// `d = -1/8`
    #[default]
    MinusEighth,
    /// `d = +1/4`, symmetric under `r -> S + 1 - r`.
    Blom,
}

impl RankOffset {
    fn fraction(self, rank: f64, total: f64) -> f64 {
        match self {
            RankOffset::MinusEighth => (rank - 0.375) / (total - 0.125),
            RankOffset::Blom => (rank - 0.375) / (total + 0.25),
        }
    }
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j share ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

/// Replace every draw by the normal quantile of its pooled fractional rank.
pub fn rank_normalize(set: &ChainSet, offset: RankOffset) -> Result<ChainSet> {
    let pooled: Vec<f64> = set
        .chains()
        .iter()
        .flat_map(|c| c.samples().iter().copied())
        .collect();
    let total = pooled.len();
    if total < 2 {
        return Err(EssError::TooShort { len: total, min: 2 });
    }
    let ranks = average_ranks(&pooled);
    let z = ranks
        .iter()
        .map(|&r| normal_quantile(offset.fraction(r, total as f64)))
        .collect::<Result<Vec<_>>>()?;
    let n = set.common_length();
    let chains = set
        .chains()
        .iter()
        .zip(z.chunks_exact(n))
        .map(|(c, zs)| Chain::new(c.id(), zs.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    ChainSet::new(chains)
}

/// How per-chain autocorrelations are merged with the PSRF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineRule {
    /// `rho(t) = 1 - 1/rhat + mean_m(s2_m rho_m(t)) / var_hat`
    #[default]
    InverseRhat,
    /// `rho(t) = 1 - (W - mean_m(s2_m rho_m(t))) / var_hat`
    WithinGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkOptions {
    pub split: bool,
    pub rank_normalize: bool,
    pub burn_in: usize,
    #[serde(default)]
    pub combine: CombineRule,
    #[serde(default)]
    pub rank_offset: RankOffset,
}

impl Default for BulkOptions {
    fn default() -> Self {
        Self {
            split: true,
            rank_normalize: true,
            burn_in: 0,
            combine: CombineRule::InverseRhat,
            rank_offset: RankOffset::MinusEighth,
        }
    }
}

/// The three ways the bulk estimator is fed in the ensemble experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BulkVariant {
    /// Groups of chains, no burn-in removed.
    GroupedNoBurnIn,
    /// One chain at a time, burn-in removed.
    SingleChain,
    /// Groups of chains, burn-in removed.
    Grouped,
}

impl BulkVariant {
    pub fn index(self) -> u8 {
        match self {
            BulkVariant::GroupedNoBurnIn => 1,
            BulkVariant::SingleChain => 2,
            BulkVariant::Grouped => 3,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(BulkVariant::GroupedNoBurnIn),
            2 => Some(BulkVariant::SingleChain),
            3 => Some(BulkVariant::Grouped),
            _ => None,
        }
    }

    pub fn is_grouped(self) -> bool {
        !matches!(self, BulkVariant::SingleChain)
    }

    /// Options for this variant given the experiment's burn-in length.
    pub fn options(self, burn_in: usize) -> BulkOptions {
        BulkOptions {
            burn_in: match self {
                BulkVariant::GroupedNoBurnIn => 0,
                _ => burn_in,
            },
            ..BulkOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkReport {
    pub rho_hat: Vec<f64>,
    pub iact: IactEstimate,
    pub ess: f64,
    pub psrf: PsrfReport,
    /// Number of (sub)chains after splitting.
    pub n_chains: usize,
    /// Length of each (sub)chain.
    pub chain_len: usize,
}

impl BulkReport {
    pub fn total_samples(&self) -> usize {
        self.n_chains * self.chain_len
    }
}

fn split_halves(set: &ChainSet) -> Result<ChainSet> {
    let n = set.common_length();
    let half = n / 2;
    let mut chains = Vec::with_capacity(2 * set.n_chains());
    for c in set.chains() {
        chains.push(Chain::new(2 * c.id(), c.samples()[..half].to_vec())?);
        // the middle draw of an odd-length chain is dropped
        chains.push(Chain::new(2 * c.id() + 1, c.samples()[n - half..].to_vec())?);
    }
    ChainSet::new(chains)
}

pub const MIN_BULK_CHAIN_LEN: usize = 8;

/// Combined multi-chain IACT and ESS.
///
/// With a single (sub)chain there is no between-chain information: the PSRF
/// is reported as `rhat = 1` with `var_hat = W = s2`, so the combined
/// autocorrelation equals the chain's own.
pub fn ess_bulk(set: &ChainSet, opts: &BulkOptions) -> Result<BulkReport> {
    let len = set.common_length();
    if opts.burn_in >= len {
        return Err(EssError::TooShort {
            len: len.saturating_sub(opts.burn_in),
            min: MIN_BULK_CHAIN_LEN,
        });
    }
    let mut work = set.slice(opts.burn_in, len);
    if opts.split {
        work = split_halves(&work)?;
    }
    let n = work.common_length();
    if n < MIN_BULK_CHAIN_LEN {
        return Err(EssError::TooShort {
            len: n,
            min: MIN_BULK_CHAIN_LEN,
        });
    }
    if opts.rank_normalize {
        work = rank_normalize(&work, opts.rank_offset)?;
    }
    let m = work.n_chains();

    let acovs = work
        .chains()
        .iter()
        .map(|c| autocov_fft(c.samples(), n - 1))
        .collect::<Result<Vec<_>>>()?;

    let psrf_report = if m >= 2 {
        psrf(&work)?
    } else {
        let s2 = acovs[0].values[0] * n as f64 / (n as f64 - 1.0);
        if s2 <= 0.0 {
            return Err(EssError::ConstantChains);
        }
        PsrfReport {
            b: 0.0,
            w: s2,
            var_hat: s2,
            rhat: 1.0,
        }
    };

    // s2_m * rho_m(t) = acov_m(t) * n / (n - 1), summed in chain order
    let unbias = n as f64 / (n as f64 - 1.0);
    let rho_hat: Vec<f64> = (0..n)
        .map(|t| {
            let avg = acovs.iter().map(|a| a.values[t] * unbias).sum::<f64>() / m as f64;
            match opts.combine {
                CombineRule::InverseRhat => 1.0 - 1.0 / psrf_report.rhat + avg / psrf_report.var_hat,
                CombineRule::WithinGap => 1.0 - (psrf_report.w - avg) / psrf_report.var_hat,
            }
        })
        .collect();

    let pairs = pair_sums(&rho_hat);
    let total = m * n;
    let iact = if pairs.first().is_none_or(|&p| p <= 0.0) {
        IactEstimate::new(1.0, Method::EssBulk, EstimatorParams::default(), total)
            .with_flag(EstimateFlag::FirstPairNonPositive)
    } else {
        let kept = initial_sequence(&pairs, GeyerVariant::InitialMonotone);
        let value = 1.0 + 2.0 * (kept.iter().sum::<f64>() - rho_hat[0]);
        let params = EstimatorParams {
            window_width: Some(2 * kept.len() - 1),
            ..Default::default()
        };
        IactEstimate::new(value, Method::EssBulk, params, total)
    };
    let ess = crate::estimate::ess_of(total, &iact);
    Ok(BulkReport {
        rho_hat,
        iact,
        ess,
        psrf: psrf_report,
        n_chains: m,
        chain_len: n,
    })
}
