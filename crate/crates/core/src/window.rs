//! Lag-window (spectral window) IACT estimators.
//!
//! ```text
//! IACT = sum_{k=-M}^{M} w(k) rho(|k|) = 1 + 2 sum_{k=1}^{M} w(k) rho(k)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{EssError, Result};
use crate::estimate::{EstimatorParams, IactEstimate, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Truncated,
    Bartlett,
    Tukey,
}

/// How the truncation lag `M` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthPolicy {
    Fixed(usize),
    /// `M = floor(sqrt(N))`.
    SqrtN,
    /// `M = floor(c * sqrt(N))`.
    ScaledSqrtN(f64),
    /// Smallest `M` with `M >= c * IACT(M)`.
    SokalAdaptive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub width: WidthPolicy,
    /// Tukey taper parameter, `0 < a <= 1/4`.
    pub tukey_a: f64,
}

pub const DEFAULT_TUKEY_A: f64 = 0.25;
pub const DEFAULT_SOKAL_C: f64 = 6.0;

impl WindowSpec {
    pub fn new(kind: WindowKind, width: WidthPolicy) -> Self {
        Self {
            kind,
            width,
            tukey_a: DEFAULT_TUKEY_A,
        }
    }

    pub fn truncated(width: WidthPolicy) -> Self {
        Self::new(WindowKind::Truncated, width)
    }

    pub fn bartlett(width: WidthPolicy) -> Self {
        Self::new(WindowKind::Bartlett, width)
    }

    pub fn tukey(width: WidthPolicy) -> Self {
        Self::new(WindowKind::Tukey, width)
    }

    pub fn with_tukey_a(mut self, a: f64) -> Self {
        self.tukey_a = a;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.kind == WindowKind::Tukey && !(self.tukey_a > 0.0 && self.tukey_a <= 0.25) {
            return Err(EssError::Argument(format!(
                "tukey a = {} outside (0, 1/4]",
                self.tukey_a
            )));
        }
        match self.width {
            WidthPolicy::Fixed(0) => Err(EssError::Argument("window width must be >= 1".into())),
            WidthPolicy::ScaledSqrtN(c) | WidthPolicy::SokalAdaptive(c) if !(c > 0.0) => Err(
                EssError::Argument(format!("width constant {c} must be positive")),
            ),
            _ => Ok(()),
        }
    }

    /// Lag weight `w(k)` for a window of width `m`.
    pub fn weight(&self, k: usize, m: usize) -> f64 {
        if k > m {
            return 0.0;
        }
        let r = k as f64 / m as f64;
        match self.kind {
            WindowKind::Truncated => 1.0,
            WindowKind::Bartlett => 1.0 - r,
            WindowKind::Tukey => {
                let a = self.tukey_a;
                1.0 - 2.0 * a + 2.0 * a * (std::f64::consts::PI * r).cos()
            }
        }
    }

    fn sum_at(&self, acorr: &[f64], m: usize) -> f64 {
        1.0 + 2.0
            * (1..=m)
                .map(|k| self.weight(k, m) * acorr[k])
                .sum::<f64>()
    }
}

fn sqrt_floor(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Resolve a non-adaptive width policy for chain length `n`.
pub fn resolve_width(policy: WidthPolicy, n: usize) -> Option<usize> {
    match policy {
        WidthPolicy::Fixed(m) => Some(m),
        WidthPolicy::SqrtN => Some(sqrt_floor(n)),
        WidthPolicy::ScaledSqrtN(c) => Some((c * (n as f64).sqrt()).floor() as usize),
        WidthPolicy::SokalAdaptive(_) => None,
    }
}

/// Largest lag the estimator may read for a chain of length `n`.
///
/// Adaptive policies can look as far as `n - 1`.
pub fn max_lag_needed(spec: &WindowSpec, n: usize) -> usize {
    resolve_width(spec.width, n).unwrap_or(n.saturating_sub(1))
}

/// Weighted-sum IACT estimate from autocorrelations `acorr[0..]`.
///
/// Non-positive results are returned as computed and carry
/// [`crate::EstimateFlag::NonPositive`].
pub fn iact_window(acorr: &[f64], n: usize, spec: &WindowSpec) -> Result<IactEstimate> {
    spec.validate()?;
    if acorr.is_empty() || (acorr[0] - 1.0).abs() > 1e-12 {
        return Err(EssError::Argument(
            "autocorrelations must start with rho(0) = 1".into(),
        ));
    }
    let max_m = acorr.len() - 1;
    let (m, iact) = match spec.width {
        WidthPolicy::SokalAdaptive(c) => {
            let found = (1..=max_m).find_map(|m| {
                let v = spec.sum_at(acorr, m);
                (m as f64 >= c * v).then_some((m, v))
            });
            found.ok_or_else(|| {
                EssError::Argument(format!(
                    "no window up to lag {max_m} satisfies M >= {c} * IACT(M)"
                ))
            })?
        }
        policy => {
            let m = resolve_width(policy, n).unwrap_or(0);
            if m == 0 || m > max_m {
                return Err(EssError::Argument(format!(
                    "window width {m} outside 1..={max_m}"
                )));
            }
            (m, spec.sum_at(acorr, m))
        }
    };
    let method = match spec.kind {
        WindowKind::Truncated => Method::Truncated,
        WindowKind::Bartlett => Method::Bartlett,
        WindowKind::Tukey => Method::Tukey,
    };
    let params = EstimatorParams {
        window_width: Some(m),
        tukey_a: (spec.kind == WindowKind::Tukey).then_some(spec.tukey_a),
        ..Default::default()
    };
    Ok(IactEstimate::new(iact, method, params, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::EstimateFlag;

    const ALT: [f64; 4] = [1.0, -0.75, 0.5, -0.25];

    #[test]
    fn bartlett_hand_example() {
        let e = iact_window(&ALT, 4, &WindowSpec::bartlett(WidthPolicy::Fixed(2))).unwrap();
        assert!((e.iact - 0.25).abs() < 1e-12);
        assert_eq!(e.params.window_width, Some(2));
    }

    #[test]
    fn truncated_negative_is_flagged() {
        let e = iact_window(&ALT, 4, &WindowSpec::truncated(WidthPolicy::Fixed(1))).unwrap();
        assert!((e.iact + 0.5).abs() < 1e-12);
        assert!(e.flags.contains(&EstimateFlag::NonPositive));
    }

    #[test]
    fn white_noise_is_one() {
        let mut rho = vec![0.0; 50];
        rho[0] = 1.0;
        for kind in [WindowKind::Truncated, WindowKind::Bartlett, WindowKind::Tukey] {
            for m in [1, 7, 49] {
                let e = iact_window(&rho, 50, &WindowSpec::new(kind, WidthPolicy::Fixed(m))).unwrap();
                assert_eq!(e.iact, 1.0);
            }
            let e = iact_window(&rho, 50, &WindowSpec::new(kind, WidthPolicy::SokalAdaptive(6.0)))
                .unwrap();
            assert_eq!(e.iact, 1.0);
            assert_eq!(e.params.window_width, Some(6));
        }
    }

    #[test]
    fn tukey_weights_taper_to_zero() {
        let spec = WindowSpec::tukey(WidthPolicy::Fixed(10));
        assert_eq!(spec.weight(0, 10), 1.0);
        assert!(spec.weight(10, 10).abs() < 1e-15);
        assert!((spec.weight(5, 10) - 0.5).abs() < 1e-15);
        assert_eq!(spec.weight(11, 10), 0.0);
    }

    #[test]
    fn width_out_of_range() {
        let r = iact_window(&ALT, 4, &WindowSpec::bartlett(WidthPolicy::Fixed(4)));
        assert!(matches!(r, Err(EssError::Argument(_))));
        let r = iact_window(&ALT, 4, &WindowSpec::bartlett(WidthPolicy::Fixed(0)));
        assert!(r.is_err());
        let bad_a = WindowSpec::tukey(WidthPolicy::Fixed(1)).with_tukey_a(0.3);
        assert!(iact_window(&ALT, 4, &bad_a).is_err());
    }

    #[test]
    fn sqrt_policy() {
        assert_eq!(resolve_width(WidthPolicy::SqrtN, 99), Some(9));
        assert_eq!(resolve_width(WidthPolicy::SqrtN, 100), Some(10));
        assert_eq!(resolve_width(WidthPolicy::ScaledSqrtN(2.5), 10_000), Some(250));
    }

    #[test]
    fn exact_ar1_converges() {
        let a: f64 = 0.5;
        let rho: Vec<f64> = (0..2000).map(|k| a.powi(k)).collect();
        let e = iact_window(&rho, 1_000_000, &WindowSpec::truncated(WidthPolicy::Fixed(1999))).unwrap();
        assert!((e.iact - 3.0).abs() < 1e-12);
        let e = iact_window(&rho, 1_000_000, &WindowSpec::bartlett(WidthPolicy::Fixed(1999))).unwrap();
        assert!((e.iact - 3.0).abs() < 3e-3);
    }
}
