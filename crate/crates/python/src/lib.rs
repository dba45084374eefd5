//! Python bindings: IACT estimators, ESS/MCSE, ESS-Bulk, PSRF and the AR(1)
//! reference process. Chains are passed as sequences of floats.

use std::collections::BTreeMap;

use ess_core::{
    ar1_exact_iact, ar1_simulate, autocov_direct, autocov_fft, autocorr, BatchMode,
    BatchSizePolicy, BatchSpec, BulkVariant, ChainSet, EstimateFlag, GeyerVariant, IactEstimate,
    WidthPolicy, WindowKind, WindowSpec,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(esskit, EssError, PyValueError);

fn py_err(e: ess_core::EssError) -> PyErr {
    EssError::new_err(e.to_string())
}

fn flag_name(f: EstimateFlag) -> &'static str {
    match f {
        EstimateFlag::NonPositive => "non_positive",
        EstimateFlag::FirstPairNonPositive => "first_pair_non_positive",
        EstimateFlag::Clamped => "clamped",
    }
}

/// An IACT estimate with the parameters that produced it.
#[pyclass(module = "esskit", frozen, get_all)]
pub struct Iact {
    pub iact: f64,
    pub method: &'static str,
    pub n_used: usize,
    pub window_width: Option<usize>,
    pub batch_size: Option<usize>,
    pub ar_order: Option<usize>,
    pub flags: Vec<&'static str>,
}

impl From<IactEstimate> for Iact {
    fn from(e: IactEstimate) -> Self {
        Self {
            iact: e.iact,
            method: e.method.name(),
            n_used: e.n_used,
            window_width: e.params.window_width,
            batch_size: e.params.batch_size,
            ar_order: e.params.ar_order,
            flags: e.flags.into_iter().map(flag_name).collect(),
        }
    }
}

#[pymethods]
impl Iact {
    /// `n / iact`; infinite for a non-positive estimate.
    fn ess(&self, n: usize) -> f64 {
        ess_core::ess_from_iact(n, self.iact)
    }

    fn __repr__(&self) -> String {
        format!("Iact(iact={}, method='{}', flags={:?})", self.iact, self.method, self.flags)
    }
}

/// Autocovariances at lags `0..=max_lag` (all lags by default), `1/N`
/// normalised.
#[pyfunction]
#[pyo3(signature = (x, max_lag=None, direct=false))]
fn autocov(x: Vec<f64>, max_lag: Option<usize>, direct: bool) -> PyResult<Vec<f64>> {
    let k = max_lag.unwrap_or(x.len().saturating_sub(1));
    let a = if direct { autocov_direct(&x, k) } else { autocov_fft(&x, k) };
    Ok(a.map_err(py_err)?.values)
}

fn width_policy(width: Option<usize>, scale: Option<f64>) -> WidthPolicy {
    match (width, scale) {
        (Some(m), _) => WidthPolicy::Fixed(m),
        (None, Some(c)) => WidthPolicy::ScaledSqrtN(c),
        (None, None) => WidthPolicy::SqrtN,
    }
}

/// Lag-window IACT. `kind` is "bartlett", "tukey" or "truncated"; the width
/// is `width` if given, else `floor(scale * sqrt(N))`, else `floor(sqrt(N))`.
#[pyfunction]
#[pyo3(signature = (x, kind="bartlett", width=None, scale=None, tukey_a=0.25))]
fn iact_window(x: Vec<f64>, kind: &str, width: Option<usize>, scale: Option<f64>, tukey_a: f64) -> PyResult<Iact> {
    let kind = match kind {
        "bartlett" => WindowKind::Bartlett,
        "tukey" => WindowKind::Tukey,
        "truncated" => WindowKind::Truncated,
        other => return Err(PyValueError::new_err(format!("unknown window {other:?}"))),
    };
    let spec = WindowSpec::new(kind, width_policy(width, scale)).with_tukey_a(tukey_a);
    let acov = autocov_fft(&x, x.len().saturating_sub(1)).map_err(py_err)?;
    let rho = autocorr(&acov).map_err(py_err)?;
    Ok(ess_core::iact_window(&rho, x.len(), &spec).map_err(py_err)?.into())
}

/// Geyer's initial positive (or, by default, monotone) sequence estimator.
#[pyfunction]
#[pyo3(signature = (x, monotone=true))]
fn iact_geyer(x: Vec<f64>, monotone: bool) -> PyResult<Iact> {
    let acov = autocov_fft(&x, x.len().saturating_sub(1)).map_err(py_err)?;
    let v = if monotone {
        GeyerVariant::InitialMonotone
    } else {
        GeyerVariant::InitialPositive
    };
    Ok(ess_core::iact_geyer(&acov, v).map_err(py_err)?.into())
}

/// AR(p) spectral estimator with AIC order selection up to `max_order`
/// (default `floor(10 log10 N)`).
#[pyfunction]
#[pyo3(signature = (x, max_order=None))]
fn iact_ar(x: Vec<f64>, max_order: Option<usize>) -> PyResult<Iact> {
    Ok(ess_core::fit_ar_iact(&x, max_order).map_err(py_err)?.1.into())
}

/// Batch means (or overlapping batch means). Without `batch_size` the chain
/// is cut into `floor(N^(1/3))` batches.
#[pyfunction]
#[pyo3(signature = (x, overlapping=false, batch_size=None, unbiased=false))]
fn iact_batch(x: Vec<f64>, overlapping: bool, batch_size: Option<usize>, unbiased: bool) -> PyResult<Iact> {
    let spec = BatchSpec {
        mode: if overlapping {
            BatchMode::Overlapping
        } else {
            BatchMode::NonOverlapping
        },
        size: batch_size.map_or(BatchSizePolicy::CountCubeRoot, BatchSizePolicy::Fixed),
        unbiased,
    };
    Ok(ess_core::iact_batch(&x, &spec).map_err(py_err)?.1.into())
}

/// `(mcse, lo, hi)` for a chain mean with the given IACT and variance.
#[pyfunction]
#[pyo3(signature = (mean, iact, r0, n, alpha=0.05))]
fn mcse_ci(mean: f64, iact: f64, r0: f64, n: usize, alpha: f64) -> PyResult<(f64, f64, f64)> {
    let m = ess_core::mcse_ci(mean, iact, r0, n, alpha).map_err(py_err)?;
    Ok((m.mcse, m.lo, m.hi))
}

/// Potential scale reduction factor as a dict with keys b, w, var_hat, rhat.
#[pyfunction]
fn psrf(chains: Vec<Vec<f64>>) -> PyResult<BTreeMap<&'static str, f64>> {
    let set = ChainSet::from_vecs(chains).map_err(py_err)?;
    let r = ess_core::psrf(&set).map_err(py_err)?;
    Ok(BTreeMap::from([("b", r.b), ("w", r.w), ("var_hat", r.var_hat), ("rhat", r.rhat)]))
}

/// Rank-normalised split ESS over a group of chains.
#[pyclass(module = "esskit", frozen, get_all)]
pub struct Bulk {
    pub iact: f64,
    pub ess: f64,
    pub rhat: f64,
    pub n_chains: usize,
    pub chain_len: usize,
    pub rho_hat: Vec<f64>,
}

#[pymethods]
impl Bulk {
    fn __repr__(&self) -> String {
        format!("Bulk(iact={}, ess={}, rhat={})", self.iact, self.ess, self.rhat)
    }
}

/// ESS-Bulk. `variant` 1 keeps the burn-in, 2 and 3 drop the first
/// `burn_in` draws of every chain.
#[pyfunction]
#[pyo3(signature = (chains, variant=3, burn_in=0))]
fn ess_bulk(chains: Vec<Vec<f64>>, variant: u8, burn_in: usize) -> PyResult<Bulk> {
    let v = BulkVariant::from_index(variant)
        .ok_or_else(|| PyValueError::new_err(format!("variant must be 1, 2 or 3, got {variant}")))?;
    let set = ChainSet::from_vecs(chains).map_err(py_err)?;
    let r = ess_core::ess_bulk(&set, &v.options(burn_in)).map_err(py_err)?;
    Ok(Bulk {
        iact: r.iact.iact,
        ess: r.ess,
        rhat: r.psrf.rhat,
        n_chains: r.n_chains,
        chain_len: r.chain_len,
        rho_hat: r.rho_hat,
    })
}

/// `n` draws of `x_t = a x_{t-1} + sigma eps_t` from `x_0 = x0`.
#[pyfunction]
#[pyo3(signature = (a, n, seed, x0=0.0, sigma=1.0))]
fn ar1(a: f64, n: usize, seed: u64, x0: f64, sigma: f64) -> PyResult<Vec<f64>> {
    let p = ess_core::Ar1Params::new(a, 0.0, sigma).map_err(py_err)?;
    Ok(ar1_simulate(&p, n, seed, ess_core::Ar1Init::Fixed(x0))
        .map_err(py_err)?
        .into_samples())
}

/// `(1 + a) / (1 - a)`.
#[pyfunction]
fn ar1_iact(a: f64) -> PyResult<f64> {
    ar1_exact_iact(a).map_err(py_err)
}

#[pymodule]
fn esskit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("EssError", m.py().get_type::<EssError>())?;
    m.add_class::<Iact>()?;
    m.add_class::<Bulk>()?;
    m.add_function(wrap_pyfunction!(autocov, m)?)?;
    m.add_function(wrap_pyfunction!(iact_window, m)?)?;
    m.add_function(wrap_pyfunction!(iact_geyer, m)?)?;
    m.add_function(wrap_pyfunction!(iact_ar, m)?)?;
    m.add_function(wrap_pyfunction!(iact_batch, m)?)?;
    m.add_function(wrap_pyfunction!(mcse_ci, m)?)?;
    m.add_function(wrap_pyfunction!(psrf, m)?)?;
    m.add_function(wrap_pyfunction!(ess_bulk, m)?)?;
    m.add_function(wrap_pyfunction!(ar1, m)?)?;
    m.add_function(wrap_pyfunction!(ar1_iact, m)?)?;
    Ok(())
}
