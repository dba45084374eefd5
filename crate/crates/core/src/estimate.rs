//! IACT estimates and the ESS / MCSE arithmetic built on them.

use serde::{Deserialize, Serialize};

use crate::error::{EssError, Result};
use crate::normal::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Truncated,
    Bartlett,
    Tukey,
    GeyerPositive,
    GeyerMonotone,
    ArFit,
    BatchMeans,
    OverlappingBatchMeans,
    EssBulk,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Truncated => "truncated",
            Method::Bartlett => "bartlett",
            Method::Tukey => "tukey",
            Method::GeyerPositive => "geyer_positive",
            Method::GeyerMonotone => "geyer_monotone",
            Method::ArFit => "ar_fit",
            Method::BatchMeans => "batch_means",
            Method::OverlappingBatchMeans => "obm",
            Method::EssBulk => "ess_bulk",
        }
    }
}

/// Method parameters that were actually used (after any policy resolution).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub window_width: Option<usize>,
    pub batch_size: Option<usize>,
    pub ar_order: Option<usize>,
    pub tukey_a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFlag {
    /// The raw estimate is zero or negative.
    NonPositive,
    /// Geyer's first pair sum was not positive; the estimate was set to 1.
    FirstPairNonPositive,
    /// The raw estimate was replaced by `max(iact, 1)`.
    Clamped,
}

/// An integrated autocorrelation time together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IactEstimate {
    pub iact: f64,
    pub method: Method,
    pub params: EstimatorParams,
    pub n_used: usize,
    pub flags: Vec<EstimateFlag>,
}

impl IactEstimate {
    pub fn new(iact: f64, method: Method, params: EstimatorParams, n_used: usize) -> Self {
        let mut flags = Vec::new();
        if iact <= 0.0 {
            flags.push(EstimateFlag::NonPositive);
        }
        Self {
            iact,
            method,
            params,
            n_used,
            flags,
        }
    }

    pub fn with_flag(mut self, flag: EstimateFlag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
        self
    }

    pub fn is_valid(&self) -> bool {
        self.iact.is_finite() && self.iact > 0.0
    }

    /// Replace the estimate by `max(iact, 1)`, keeping every existing flag.
    pub fn clamped(self) -> Self {
        if self.iact >= 1.0 {
            return self;
        }
        let mut out = self.with_flag(EstimateFlag::Clamped);
        out.iact = 1.0;
        out
    }

    pub fn ess(&self, n: usize) -> f64 {
        ess_of(n, self)
    }
}

/// `n / iact`, or `+inf` when the estimate is not strictly positive.
///
/// The invalid case is visible through [`IactEstimate::is_valid`] and the
/// estimate's flags.
pub fn ess_of(n: usize, iact: &IactEstimate) -> f64 {
    ess_from_iact(n, iact.iact)
}

pub fn ess_from_iact(n: usize, iact: f64) -> f64 {
    if iact > 0.0 {
        n as f64 / iact
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McseInterval {
    pub mcse: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Monte Carlo standard error `sqrt(iact * r0 / n)` and the two-sided
/// normal interval of level `1 - alpha` around `mean`.
pub fn mcse_ci(mean: f64, iact: f64, r0: f64, n: usize, alpha: f64) -> Result<McseInterval> {
    if !(iact > 0.0) || !iact.is_finite() {
        return Err(EssError::InvalidIact(iact));
    }
    if r0 < 0.0 || !r0.is_finite() {
        return Err(EssError::Argument(format!("r0 = {r0} must be non-negative")));
    }
    if n == 0 {
        return Err(EssError::Argument("n must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EssError::Argument(format!("alpha = {alpha} outside (0, 1)")));
    }
    let mcse = (iact * r0 / n as f64).sqrt();
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    Ok(McseInterval {
        mcse,
        lo: mean - z * mcse,
        hi: mean + z * mcse,
    })
}
