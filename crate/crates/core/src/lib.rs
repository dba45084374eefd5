//! Estimators of the integrated autocorrelation time (IACT) and effective
//! sample size (ESS) of MCMC output, plus an exact AR(1) reference process.
//!
//! Every estimator returns an [`IactEstimate`]; ESS and Monte Carlo standard
//! errors follow from it through [`ess_of`] and [`mcse_ci`].

pub mod ar;
pub mod ar1;
pub mod batch;
pub mod bulk;
pub mod chain;
pub mod error;
pub mod estimate;
pub mod geyer;
pub mod normal;
pub mod rng;
pub mod window;

pub use ar::{fit_ar_from_acov, fit_ar_iact, levinson_durbin, ArModel};
pub use ar1::{
    ar1_coeff_for_iact, ar1_exact_iact, ar1_simulate, ar1_transient_moments, Ar1Init, Ar1Params,
};
pub use batch::{iact_batch, iact_bm, iact_obm, BatchMode, BatchSizePolicy, BatchSpec};
pub use bulk::{
    ess_bulk, psrf, rank_normalize, BulkOptions, BulkReport, BulkVariant, CombineRule, PsrfReport,
    RankOffset,
};
pub use chain::{autocorr, autocov_direct, autocov_fft, mean_and_var, AcovSeq, Chain, ChainSet};
pub use error::{EssError, Result};
pub use estimate::{
    ess_from_iact, ess_of, mcse_ci, EstimateFlag, EstimatorParams, IactEstimate, McseInterval,
    Method,
};
pub use geyer::{iact_geyer, GeyerVariant};
pub use normal::{normal_cdf, normal_quantile};
pub use window::{iact_window, WidthPolicy, WindowKind, WindowSpec};
