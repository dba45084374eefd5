//! Chains, sample moments and autocovariance estimation.
//!
//! Autocovariances always use the biased `1/N` normalisation
//!
//! ```text
//! R(k) = (1/N) * sum_{i=1}^{N-k} (x_i - mean)(x_{i+k} - mean)
//! ```
//!
//! which keeps the estimated sequence positive semi-definite.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{EssError, Result};

/// One MCMC trajectory of scalar draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    id: usize,
    samples: Vec<f64>,
}

impl Chain {
    pub fn new(id: usize, samples: Vec<f64>) -> Result<Self> {
        if let Some(pos) = samples.iter().position(|x| !x.is_finite()) {
            return Err(EssError::Argument(format!(
                "chain {id} has a non-finite sample at index {pos}"
            )));
        }
        Ok(Self { id, samples })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Keep only `samples[start..end]`.
    pub fn slice(&self, start: usize, end: usize) -> Chain {
        Chain {
            id: self.id,
            samples: self.samples[start..end].to_vec(),
        }
    }
}

impl AsRef<[f64]> for Chain {
    fn as_ref(&self) -> &[f64] {
        &self.samples
    }
}

/// Several equal-length chains analysed jointly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSet {
    chains: Vec<Chain>,
}

impl ChainSet {
    pub fn new(chains: Vec<Chain>) -> Result<Self> {
        let first = chains
            .first()
            .ok_or_else(|| EssError::Argument("a chain set needs at least one chain".into()))?;
        let expected = first.len();
        for c in &chains {
            if c.len() != expected {
                return Err(EssError::RaggedChains {
                    expected,
                    found: c.len(),
                });
            }
        }
        Ok(Self { chains })
    }

    /// Build a set from raw sample vectors, numbering chains from zero.
    pub fn from_vecs(samples: Vec<Vec<f64>>) -> Result<Self> {
        let chains = samples
            .into_iter()
            .enumerate()
            .map(|(id, s)| Chain::new(id, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(chains)
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn into_chains(self) -> Vec<Chain> {
        self.chains
    }

    pub fn n_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn common_length(&self) -> usize {
        self.chains[0].len()
    }

    pub fn total_samples(&self) -> usize {
        self.n_chains() * self.common_length()
    }

    /// Apply the same `[start, end)` window to every chain.
    pub fn slice(&self, start: usize, end: usize) -> ChainSet {
        ChainSet {
            chains: self.chains.iter().map(|c| c.slice(start, end)).collect(),
        }
    }
}

/// Estimated autocovariances at lags `0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcovSeq {
    pub values: Vec<f64>,
    /// Length of the chain the estimate came from.
    pub n: usize,
    pub mean_used: f64,
}

impl AcovSeq {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn r0(&self) -> f64 {
        self.values[0]
    }
}

fn mean_of(x: &[f64]) -> f64 {
    // A constant chain must centre to exact zeros.
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        return first;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample mean and the `1/N`-normalised lag-0 autocovariance.
pub fn mean_and_var(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 2 {
        return Err(EssError::TooShort {
            len: x.len(),
            min: 2,
        });
    }
    let mean = mean_of(x);
    let r0 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.len() as f64;
    Ok((mean, r0))
}

fn check_lag(n: usize, max_lag: usize) -> Result<()> {
    if n < 2 {
        return Err(EssError::TooShort { len: n, min: 2 });
    }
    if max_lag > n - 1 {
        return Err(EssError::Argument(format!(
            "max_lag {max_lag} exceeds N - 1 = {}",
            n - 1
        )));
    }
    Ok(())
}

/// Autocovariances by the O(N K) lag-product sum.
pub fn autocov_direct(x: &[f64], max_lag: usize) -> Result<AcovSeq> {
    let n = x.len();
    check_lag(n, max_lag)?;
    let mean = mean_of(x);
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let values = (0..=max_lag)
        .map(|k| {
            centred[..n - k]
                .iter()
                .zip(&centred[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Ok(AcovSeq {
        values,
        n,
        mean_used: mean,
    })
}

/// Autocovariances through the periodogram.
///
/// The centred chain is zero-padded to the next power of two at least `2N`
/// so the circular correlation computed by the transform equals the linear
/// one.
pub fn autocov_fft(x: &[f64], max_lag: usize) -> Result<AcovSeq> {
    let n = x.len();
    check_lag(n, max_lag)?;
    let mean = mean_of(x);
    let len = (2 * n).next_power_of_two();

    let mut buf: Vec<Complex<f64>> = Vec::with_capacity(len);
    buf.extend(x.iter().map(|v| Complex::new(v - mean, 0.0)));
    buf.resize(len, Complex::new(0.0, 0.0));

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);

    // rustfft leaves transforms unnormalised: divide by the padded length,
    // then by N for the autocovariance normalisation.
    let scale = 1.0 / (len as f64 * n as f64);
    let values = buf[..=max_lag].iter().map(|c| c.re * scale).collect();
    Ok(AcovSeq {
        values,
        n,
        mean_used: mean,
    })
}

/// Normalise autocovariances to autocorrelations.
pub fn autocorr(acov: &AcovSeq) -> Result<Vec<f64>> {
    let r0 = acov.values[0];
    if r0 <= 0.0 {
        return Err(EssError::ZeroVariance);
    }
    let mut rho: Vec<f64> = acov.values.iter().map(|v| v / r0).collect();
    rho[0] = 1.0;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_small_chain() {
        let (m, r0) = mean_and_var(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m, 3.5);
        assert!((r0 - 17.5 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn constant_chain_has_zero_variance() {
        let (m, r0) = mean_and_var(&[0.3; 4]).unwrap();
        assert_eq!(m, 0.3);
        assert_eq!(r0, 0.0);
        let a = autocov_direct(&[0.3; 7], 6).unwrap();
        assert!(a.values.iter().all(|&v| v == 0.0));
        let f = autocov_fft(&[0.3; 7], 6).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_chain_rejected() {
        assert!(matches!(
            mean_and_var(&[1.0]),
            Err(EssError::TooShort { len: 1, min: 2 })
        ));
    }

    #[test]
    fn alternating_chain_direct() {
        let a = autocov_direct(&[1.0, -1.0, 1.0, -1.0], 3).unwrap();
        let expected = [1.0, -0.75, 0.5, -0.25];
        for (v, e) in a.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct_on_alternating() {
        let x = [1.0, -1.0, 1.0, -1.0];
        let d = autocov_direct(&x, 3).unwrap();
        let f = autocov_fft(&x, 3).unwrap();
        for (a, b) in d.values.iter().zip(&f.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_two_samples() {
        let f = autocov_fft(&[0.0, 1.0], 1).unwrap();
        assert!((f.values[0] - 0.25).abs() < 1e-14);
        assert!((f.values[1] + 0.125).abs() < 1e-14);
    }

    #[test]
    fn lag_out_of_range() {
        assert!(matches!(
            autocov_direct(&[1.0, 2.0, 3.0], 3),
            Err(EssError::Argument(_))
        ));
        assert!(matches!(
            autocov_fft(&[1.0, 2.0, 3.0], 3),
            Err(EssError::Argument(_))
        ));
    }

    #[test]
    fn lag_zero_is_r0() {
        let x = [0.3, -1.2, 4.0, 2.2, 0.9];
        let (_, r0) = mean_and_var(&x).unwrap();
        assert_eq!(autocov_direct(&x, 0).unwrap().values[0], r0);
    }

    #[test]
    fn autocorr_scaling() {
        let acov = AcovSeq {
            values: vec![4.0, 2.0, 1.0],
            n: 3,
            mean_used: 0.0,
        };
        assert_eq!(autocorr(&acov).unwrap(), vec![1.0, 0.5, 0.25]);
        let zero = AcovSeq {
            values: vec![0.0, 0.0],
            n: 2,
            mean_used: 1.0,
        };
        assert_eq!(autocorr(&zero), Err(EssError::ZeroVariance));
    }

    #[test]
    fn ragged_set_rejected() {
        let r = ChainSet::from_vecs(vec![vec![1.0, 2.0], vec![1.0]]);
        assert!(matches!(r, Err(EssError::RaggedChains { .. })));
        assert!(Chain::new(0, vec![1.0, f64::NAN]).is_err());
    }
}
