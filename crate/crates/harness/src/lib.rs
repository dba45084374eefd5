//! Experiment driver for the IACT/ESS estimator suite: AR(1) replicate
//! ensembles, MCMC runs on the Darcy inverse problem, post-hoc analysis of
//! chain files, and reports.

pub mod analyze;
pub mod chain_io;
pub mod config;
pub mod elliptic_run;
pub mod ensemble;
pub mod error;
pub mod estimators;
pub mod output;
pub mod report;
pub mod rows;

pub use config::{AnalysisMode, ExperimentConfig, ExperimentKind};
pub use error::{HarnessError, Result};
pub use output::OutputFormat;

/// Run `f` on a dedicated pool of `threads` workers (0 picks the rayon
/// default). Results never depend on the thread count.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
