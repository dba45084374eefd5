//! Estimator specifications as they appear in configs, and their dispatch.

use ess_core::window::{DEFAULT_TUKEY_A, WindowSpec};
use ess_core::{
    autocorr, autocov_fft, ess_bulk, fit_ar_from_acov, iact_batch, iact_geyer, iact_window,
    mean_and_var, AcovSeq, BatchMode, BatchSizePolicy, BatchSpec, BulkReport, BulkVariant,
    ChainSet, GeyerVariant, IactEstimate, WidthPolicy,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

fn sqrt_n() -> WidthPolicy {
    WidthPolicy::SqrtN
}

fn tukey_a() -> f64 {
    DEFAULT_TUKEY_A
}

fn two_thirds() -> BatchSizePolicy {
    BatchSizePolicy::CountTwoThirds
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EstimatorSpec {
    Truncated {
        #[serde(default = "sqrt_n")]
        width: WidthPolicy,
    },
    Bartlett {
        #[serde(default = "sqrt_n")]
        width: WidthPolicy,
    },
    Tukey {
        #[serde(default = "sqrt_n")]
        width: WidthPolicy,
        #[serde(default = "tukey_a")]
        a: f64,
    },
    GeyerPositive,
    GeyerMonotone,
    ArFit {
        #[serde(default)]
        max_order: Option<usize>,
    },
    BatchMeans {
        #[serde(default = "two_thirds")]
        size: BatchSizePolicy,
        #[serde(default)]
        unbiased: bool,
    },
    #[serde(rename = "obm")]
    OverlappingBatchMeans {
        #[serde(default = "two_thirds")]
        size: BatchSizePolicy,
        #[serde(default)]
        unbiased: bool,
    },
    EssBulk {
        /// 1: groups without burn-in removal, 2: one chain at a time,
        /// 3: groups with burn-in removed.
        variant: u8,
    },
}

impl EstimatorSpec {
    pub fn default_label(&self) -> String {
        match self {
            EstimatorSpec::Truncated { .. } => "truncated".into(),
            EstimatorSpec::Bartlett { .. } => "bartlett".into(),
            EstimatorSpec::Tukey { .. } => "tukey".into(),
            EstimatorSpec::GeyerPositive => "geyer_positive".into(),
            EstimatorSpec::GeyerMonotone => "geyer_monotone".into(),
            EstimatorSpec::ArFit { .. } => "ar_fit".into(),
            EstimatorSpec::BatchMeans { .. } => "batch_means".into(),
            EstimatorSpec::OverlappingBatchMeans { .. } => "obm".into(),
            EstimatorSpec::EssBulk { variant } => format!("ess_bulk_{variant}"),
        }
    }

    pub fn bulk_variant(&self) -> Option<BulkVariant> {
        match self {
            EstimatorSpec::EssBulk { variant } => BulkVariant::from_index(*variant),
            _ => None,
        }
    }

    /// Whether the estimator consumes a group of chains rather than one.
    pub fn is_grouped(&self) -> bool {
        self.bulk_variant().is_some_and(BulkVariant::is_grouped)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorEntry {
    #[serde(flatten)]
    pub spec: EstimatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl EstimatorEntry {
    pub fn new(spec: EstimatorSpec) -> Self {
        Self { spec, label: None }
    }

    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.spec.default_label())
    }
}

/// A single chain with its moments and full autocovariance computed once
/// and shared by all lag-based estimators.
pub struct Prepared<'a> {
    pub x: &'a [f64],
    pub mean: f64,
    pub r0: f64,
    acov: AcovSeq,
}

impl<'a> Prepared<'a> {
    pub fn new(x: &'a [f64]) -> Result<Self> {
        let (mean, r0) = mean_and_var(x)?;
        let acov = autocov_fft(x, x.len() - 1)?;
        Ok(Self { x, mean, r0, acov })
    }

    pub fn acov(&self) -> &AcovSeq {
        &self.acov
    }
}

fn window(spec: WindowSpec, p: &Prepared) -> Result<IactEstimate> {
    let rho = autocorr(&p.acov)?;
    Ok(iact_window(&rho, p.x.len(), &spec)?)
}

fn batch(mode: BatchMode, size: BatchSizePolicy, unbiased: bool, x: &[f64]) -> Result<IactEstimate> {
    let spec = BatchSpec {
        mode,
        size,
        unbiased,
    };
    Ok(iact_batch(x, &spec)?.1)
}

/// IACT of one chain. ESS-Bulk variant 2 runs the full bulk pipeline
/// (split, rank-normalise) on the chain alone.
pub fn estimate_single(spec: &EstimatorSpec, p: &Prepared) -> Result<IactEstimate> {
    match *spec {
        EstimatorSpec::Truncated { width } => window(WindowSpec::truncated(width), p),
        EstimatorSpec::Bartlett { width } => window(WindowSpec::bartlett(width), p),
        EstimatorSpec::Tukey { width, a } => window(WindowSpec::tukey(width).with_tukey_a(a), p),
        EstimatorSpec::GeyerPositive => Ok(iact_geyer(&p.acov, GeyerVariant::InitialPositive)?),
        EstimatorSpec::GeyerMonotone => Ok(iact_geyer(&p.acov, GeyerVariant::InitialMonotone)?),
        EstimatorSpec::ArFit { max_order } => {
            let n = p.x.len();
            let p_max = max_order
                .unwrap_or_else(|| ess_core::ar::default_max_order(n))
                .min(n - 1);
            Ok(fit_ar_from_acov(&p.acov, p_max)?.1)
        }
        EstimatorSpec::BatchMeans { size, unbiased } => {
            batch(BatchMode::NonOverlapping, size, unbiased, p.x)
        }
        EstimatorSpec::OverlappingBatchMeans { size, unbiased } => {
            batch(BatchMode::Overlapping, size, unbiased, p.x)
        }
        EstimatorSpec::EssBulk { variant } => match BulkVariant::from_index(variant) {
            Some(BulkVariant::SingleChain) => {
                let set = ChainSet::from_vecs(vec![p.x.to_vec()])?;
                Ok(ess_bulk(&set, &BulkVariant::SingleChain.options(0))?.iact)
            }
            _ => Err(HarnessError::Config(format!(
                "ess_bulk variant {variant} needs a group of chains"
            ))),
        },
    }
}

/// ESS-Bulk on a group of equally long chains that have already been cut to
/// the samples the variant should see.
pub fn estimate_group(spec: &EstimatorSpec, chains: Vec<Vec<f64>>) -> Result<BulkReport> {
    let variant = spec
        .bulk_variant()
        .ok_or_else(|| HarnessError::Config(format!("{spec:?} is not an ESS-Bulk variant")))?;
    let set = ChainSet::from_vecs(chains)?;
    Ok(ess_bulk(&set, &variant.options(0))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shapes() {
        let e: EstimatorEntry =
            serde_json::from_str(r#"{"method":"tukey","width":{"scaled_sqrt_n":2.5}}"#).unwrap();
        assert_eq!(
            e.spec,
            EstimatorSpec::Tukey {
                width: WidthPolicy::ScaledSqrtN(2.5),
                a: 0.25
            }
        );
        assert_eq!(e.label(), "tukey");
        let e: EstimatorEntry =
            serde_json::from_str(r#"{"method":"obm","size":{"fixed":50},"label":"obm50"}"#)
                .unwrap();
        assert_eq!(e.label(), "obm50");
        let e: EstimatorEntry = serde_json::from_str(r#"{"method":"geyer_monotone"}"#).unwrap();
        assert_eq!(e.spec, EstimatorSpec::GeyerMonotone);
        let e: EstimatorEntry = serde_json::from_str(r#"{"method":"batch_means"}"#).unwrap();
        assert_eq!(
            e.spec,
            EstimatorSpec::BatchMeans {
                size: BatchSizePolicy::CountTwoThirds,
                unbiased: false
            }
        );
        assert!(serde_json::from_str::<EstimatorEntry>(r#"{"method":"nope"}"#).is_err());
    }

    #[test]
    fn grouped_variants() {
        assert!(EstimatorSpec::EssBulk { variant: 1 }.is_grouped());
        assert!(!EstimatorSpec::EssBulk { variant: 2 }.is_grouped());
        assert!(EstimatorSpec::EssBulk { variant: 3 }.is_grouped());
        assert!(!EstimatorSpec::GeyerMonotone.is_grouped());
    }
}
