//! Non-overlapping and overlapping batch means.

use serde::{Deserialize, Serialize};

use crate::chain::mean_and_var;
use crate::error::{EssError, Result};
use crate::estimate::{EstimatorParams, IactEstimate, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchMode {
    NonOverlapping,
    Overlapping,
}

/// Batch size selection. The two count policies fix the number of batches
/// `k` and derive the size as `m = floor(N / k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchSizePolicy {
    Fixed(usize),
    /// `k = floor(N^(1/3))` batches.
    #[serde(rename = "count_cuberoot")]
    CountCubeRoot,
    /// `k = floor(N^(2/3))` batches.
    #[serde(rename = "count_twothirds")]
    CountTwoThirds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub mode: BatchMode,
    pub size: BatchSizePolicy,
    /// Use `1/(k-1)` instead of `1/k` for the variance of batch means.
    #[serde(default)]
    pub unbiased: bool,
}

impl BatchSpec {
    pub fn new(mode: BatchMode, size: BatchSizePolicy) -> Self {
        Self {
            mode,
            size,
            unbiased: false,
        }
    }
}

/// Largest `k` with `k^3 <= v`.
fn icbrt(v: u128) -> u128 {
    let mut k = (v as f64).cbrt() as u128;
    while k * k * k > v {
        k -= 1;
    }
    while (k + 1) * (k + 1) * (k + 1) <= v {
        k += 1;
    }
    k
}

/// Number of batches for a count policy (exact integer roots).
pub fn batch_count(policy: BatchSizePolicy, n: usize) -> Option<usize> {
    match policy {
        BatchSizePolicy::Fixed(_) => None,
        BatchSizePolicy::CountCubeRoot => Some(icbrt(n as u128) as usize),
        BatchSizePolicy::CountTwoThirds => Some(icbrt((n as u128) * (n as u128)) as usize),
    }
}

/// Resolved batch size for a chain of length `n`.
pub fn resolve_batch_size(policy: BatchSizePolicy, n: usize) -> Result<usize> {
    match policy {
        BatchSizePolicy::Fixed(m) => Ok(m),
        p => {
            let k = batch_count(p, n).unwrap_or(0);
            if k < 2 {
                return Err(EssError::TooFewBatches { batches: k });
            }
            Ok(n / k)
        }
    }
}

fn finish(gamma2: f64, r0: f64, method: Method, m: usize, n: usize) -> Result<(f64, IactEstimate)> {
    if r0 <= 0.0 {
        return Err(EssError::ZeroVariance);
    }
    let params = EstimatorParams {
        batch_size: Some(m),
        ..Default::default()
    };
    Ok((gamma2, IactEstimate::new(gamma2 / r0, method, params, n)))
}

/// Non-overlapping batch means. Returns the asymptotic-variance estimate
/// `gamma2 = m * var(batch means)` and `IACT = gamma2 / R(0)`.
///
/// Samples past the last full batch are dropped from the end.
pub fn iact_bm(x: &[f64], spec: &BatchSpec) -> Result<(f64, IactEstimate)> {
    let n = x.len();
    let (_, r0) = mean_and_var(x)?;
    let m = resolve_batch_size(spec.size, n)?;
    if m < 1 {
        return Err(EssError::Argument("batch size must be at least 1".into()));
    }
    if matches!(spec.size, BatchSizePolicy::Fixed(_)) && (m < 2 || m > n / 2) {
        return Err(EssError::Argument(format!(
            "batch size {m} outside 2..={}",
            n / 2
        )));
    }
    let k = n / m;
    if k < 2 {
        return Err(EssError::TooFewBatches { batches: k });
    }
    let means: Vec<f64> = x[..k * m]
        .chunks_exact(m)
        .map(|b| b.iter().sum::<f64>() / m as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / k as f64;
    let ss: f64 = means.iter().map(|v| (v - grand) * (v - grand)).sum();
    let denom = if spec.unbiased { k - 1 } else { k } as f64;
    let gamma2 = m as f64 * ss / denom;
    finish(gamma2, r0, Method::BatchMeans, m, n)
}

/// Overlapping batch means over all `N - m + 1` windows of length `m`:
///
/// ```text
/// gamma2 = N m / ((N - m)(N - m + 1)) * sum_j (window_mean_j - mean)^2
/// ```
pub fn iact_obm(x: &[f64], spec: &BatchSpec) -> Result<(f64, IactEstimate)> {
    let n = x.len();
    let (mean, r0) = mean_and_var(x)?;
    let m = resolve_batch_size(spec.size, n)?;
    if m < 2 || m > n - 1 {
        return Err(EssError::Argument(format!(
            "batch size {m} outside 2..={}",
            n - 1
        )));
    }
    // Rolling window sums of the centred chain.
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let mut window: f64 = centred[..m].iter().sum();
    let mut ss = window * window;
    for j in m..n {
        window += centred[j] - centred[j - m];
        ss += window * window;
    }
    let (nf, mf) = (n as f64, m as f64);
    // ss holds squared window sums; divide by m^2 for squared window means.
    let gamma2 = nf * mf / ((nf - mf) * (nf - mf + 1.0)) * ss / (mf * mf);
    finish(gamma2, r0, Method::OverlappingBatchMeans, m, n)
}

/// Dispatch on [`BatchSpec::mode`].
pub fn iact_batch(x: &[f64], spec: &BatchSpec) -> Result<(f64, IactEstimate)> {
    match spec.mode {
        BatchMode::NonOverlapping => iact_bm(x, spec),
        BatchMode::Overlapping => iact_obm(x, spec),
    }
}
