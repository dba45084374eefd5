//! Autoregressive spectral estimate of the IACT.
//!
//! Fits `X_t = sum_i phi_i X_{t-i} + e_t` by Yule-Walker (Levinson-Durbin),
//! picks the order by AIC and evaluates the model spectrum at frequency 0:
//!
//! ```text
//! IACT = s2_p / ((1 - sum phi_i)^2 * R(0))
//! ```

use serde::{Deserialize, Serialize};

use crate::chain::{autocov_direct, AcovSeq};
use crate::error::{EssError, Result};
use crate::estimate::{EstimatorParams, IactEstimate, Method};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub order: usize,
    /// `phi_1..phi_p` in regression form.
    pub coeffs: Vec<f64>,
    pub innovation_var: f64,
    pub aic: f64,
    /// Partial autocorrelations produced by the recursion.
    pub reflection: Vec<f64>,
}

impl ArModel {
    /// Yule-Walker fits from a positive-definite autocovariance sequence have
    /// all reflection coefficients inside (-1, 1), which is equivalent to all
    /// roots of `1 - sum phi_i z^i` lying outside the unit circle.
    pub fn is_stationary(&self) -> bool {
        self.reflection.iter().all(|k| k.abs() < 1.0)
    }

    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// Default maximum order `floor(10 log10 N)`, capped at `N - 2`.
pub fn default_max_order(n: usize) -> usize {
    let p = (10.0 * (n as f64).log10()).floor() as usize;
    p.min(n.saturating_sub(2)).max(1)
}

/// Levinson-Durbin recursion on `r[0..=p_max]`.
///
/// Returns one model per order `0..=P` where `P <= p_max` is the last order
/// whose prediction-error variance stayed positive. `n` enters only through
/// the AIC.
pub fn levinson_durbin(r: &[f64], p_max: usize, n: usize) -> Result<Vec<ArModel>> {
    let r0 = *r.first().ok_or_else(|| EssError::Argument("empty autocovariance".into()))?;
    if !(r0 > 0.0) {
        return Err(EssError::Degenerate(
            "zero variance: Toeplitz system is singular".into(),
        ));
    }
    if p_max >= r.len() {
        return Err(EssError::Argument(format!(
            "order {p_max} needs autocovariances up to lag {p_max}, have {}",
            r.len() - 1
        )));
    }
    let aic = |var: f64, p: usize| n as f64 * var.ln() + 2.0 * p as f64;
    let mut models = vec![ArModel {
        order: 0,
        coeffs: Vec::new(),
        innovation_var: r0,
        aic: aic(r0, 0),
        reflection: Vec::new(),
    }];
    let mut phi: Vec<f64> = Vec::new();
    let mut var = r0;
    let mut refl = Vec::new();
    for k in 1..=p_max {
        let acc: f64 = phi.iter().enumerate().map(|(j, p)| p * r[k - 1 - j]).sum();
        let kappa = (r[k] - acc) / var;
        let next_var = var * (1.0 - kappa * kappa);
        if !(next_var > 0.0) || !kappa.is_finite() {
            break;
        }
        let mut next = Vec::with_capacity(k);
        for j in 0..k - 1 {
            next.push(phi[j] - kappa * phi[k - 2 - j]);
        }
        next.push(kappa);
        phi = next;
        var = next_var;
        refl.push(kappa);
        models.push(ArModel {
            order: k,
            coeffs: phi.clone(),
            innovation_var: var,
            aic: aic(var, k),
            reflection: refl.clone(),
        });
    }
    Ok(models)
}

/// AIC-minimising model among the Levinson-Durbin fits; ties go to the
/// lower order.
pub fn select_by_aic(models: Vec<ArModel>) -> ArModel {
    models
        .into_iter()
        .reduce(|best, m| if m.aic < best.aic { m } else { best })
        .expect("levinson_durbin always yields the order-0 model")
}

/// IACT implied by a fitted model, normalised by the process variance `r0`.
pub fn ar_iact(model: &ArModel, r0: f64) -> Result<f64> {
    let denom = 1.0 - model.coeff_sum();
    if denom.abs() < 1e-12 {
        return Err(EssError::NearUnitRoot(denom.abs()));
    }
    Ok(model.innovation_var / (denom * denom * r0))
}

/// Fit from precomputed autocovariances (which must reach lag `p_max`).
pub fn fit_ar_from_acov(acov: &AcovSeq, p_max: usize) -> Result<(ArModel, IactEstimate)> {
    let models = levinson_durbin(&acov.values, p_max, acov.n)?;
    let model = select_by_aic(models);
    let iact = ar_iact(&model, acov.values[0])?;
    let params = EstimatorParams {
        ar_order: Some(model.order),
        ..Default::default()
    };
    Ok((model, IactEstimate::new(iact, Method::ArFit, params, acov.n)))
}

/// Fit AR(p) models up to `p_max` (default `floor(10 log10 N)`) to a chain.
pub fn fit_ar_iact(x: &[f64], p_max: Option<usize>) -> Result<(ArModel, IactEstimate)> {
    let n = x.len();
    let p_max = p_max.unwrap_or_else(|| default_max_order(n));
    if p_max < 1 {
        return Err(EssError::Argument("p_max must be at least 1".into()));
    }
    if n < p_max + 2 {
        return Err(EssError::TooShort {
            len: n,
            min: p_max + 2,
        });
    }
    let acov = autocov_direct(x, p_max)?;
    if acov.values[0] <= 0.0 {
        return Err(EssError::Degenerate(
            "zero variance: Toeplitz system is singular".into(),
        ));
    }
    fit_ar_from_acov(&acov, p_max)
}
