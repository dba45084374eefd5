//! Geyer's initial sequence estimators for reversible chains.
//!
//! Pair sums `G_m = R(2m) + R(2m+1)` of a reversible chain are positive,
//! decreasing and convex in `m`. The estimators keep pairs up to the first
//! non-positive one, optionally enforcing monotonicity with a running minimum.

use serde::{Deserialize, Serialize};

use crate::chain::AcovSeq;
use crate::error::{EssError, Result};
use crate::estimate::{EstimateFlag, EstimatorParams, IactEstimate, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeyerVariant {
    InitialPositive,
    InitialMonotone,
}

/// Adjacent pair sums of a sequence; an unpaired trailing value is dropped.
pub fn pair_sums(values: &[f64]) -> Vec<f64> {
    values.chunks_exact(2).map(|p| p[0] + p[1]).collect()
}

/// Truncate pair sums at the first non-positive entry and, for the
/// monotone variant, replace each by the running minimum.
pub fn initial_sequence(pairs: &[f64], variant: GeyerVariant) -> Vec<f64> {
    let mut out = Vec::with_capacity(pairs.len());
    let mut running = f64::INFINITY;
    for &g in pairs {
        if g <= 0.0 {
            break;
        }
        let v = match variant {
            GeyerVariant::InitialPositive => g,
            GeyerVariant::InitialMonotone => {
                running = running.min(g);
                running
            }
        };
        out.push(v);
    }
    out
}

pub fn iact_geyer(acov: &AcovSeq, variant: GeyerVariant) -> Result<IactEstimate> {
    let gamma0 = acov.values[0];
    if gamma0 <= 0.0 {
        return Err(EssError::ZeroVariance);
    }
    let method = match variant {
        GeyerVariant::InitialPositive => Method::GeyerPositive,
        GeyerVariant::InitialMonotone => Method::GeyerMonotone,
    };
    let pairs = pair_sums(&acov.values);
    if pairs.first().is_none_or(|&g| g <= 0.0) {
        return Ok(
            IactEstimate::new(1.0, method, EstimatorParams::default(), acov.n)
                .with_flag(EstimateFlag::FirstPairNonPositive),
        );
    }
    let kept = initial_sequence(&pairs, variant);
    let iact = (2.0 * kept.iter().sum::<f64>() - gamma0) / gamma0;
    let params = EstimatorParams {
        // last lag that entered the sum
        window_width: Some(2 * kept.len() - 1),
        ..Default::default()
    };
    Ok(IactEstimate::new(iact, method, params, acov.n))
}
