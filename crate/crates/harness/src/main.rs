use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use ess_harness::analyze::analyze;
use ess_harness::elliptic_run::{run_elliptic, write_synthetic, SyntheticData};
use ess_harness::ensemble::run_ar1_ensemble;
use ess_harness::report::report_dir;
use ess_harness::{with_threads, ExperimentConfig, ExperimentKind, OutputFormat};

#[derive(Parser)]
#[command(name = "ess-harness", version, about = "IACT / ESS estimator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Common {
    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an AR(1) replicate ensemble and evaluate every estimator.
    Ar1(Common),
    /// Darcy inverse problem.
    Elliptic {
        #[command(subcommand)]
        action: EllipticAction,
    },
    /// Evaluate the estimators on existing chain files.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print the summary tables of an output directory.
    Report { dir: PathBuf },
}

#[derive(Subcommand)]
enum EllipticAction {
    /// Write synthetic observations and the true fields.
    Synth(Common),
    /// Run the MCMC chains.
    Run {
        #[command(flatten)]
        common: Common,
        /// Use previously written `synthetic.json` instead of regenerating.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> anyhow::Result<()> {
    if cfg.kind != kind {
        bail!("config kind is {:?}, this command needs {:?}", cfg.kind, kind);
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Ar1(c) => {
            let cfg = c.config()?;
            expect_kind(&cfg, ExperimentKind::Ar1Ensemble)?;
            let res = with_threads(c.threads, || run_ar1_ensemble(&cfg, &c.out, c.format.into()))?;
            eprintln!("{} rows written to {}", res.rows.len(), c.out.display());
        }
        Command::Elliptic { action } => match action {
            EllipticAction::Synth(c) => {
                let cfg = c.config()?;
                let s = write_synthetic(&cfg, &c.out)?;
                eprintln!("{} observations written to {}", s.data.len(), c.out.display());
            }
            EllipticAction::Run { common: c, data } => {
                let cfg = c.config()?;
                expect_kind(&cfg, ExperimentKind::EllipticRun)?;
                let synth = data.as_deref().map(SyntheticData::load).transpose()?;
                let out = with_threads(c.threads, || run_elliptic(&cfg, &c.out, synth))?;
                for ch in &out.chains {
                    eprintln!(
                        "chain {}: acceptance {:.3}, {} fine solves",
                        ch.summary.chain, ch.summary.acceptance_rate, ch.summary.stats.fine_solves
                    );
                }
            }
        },
        Command::Analyze { common: c, inputs } => {
            let cfg = c.config()?;
            with_threads(c.threads, || analyze(&cfg, &inputs, &c.out, c.format.into()))?;
            eprintln!("analysis written to {}", c.out.display());
        }
        Command::Report { dir } => print!("{}", report_dir(&dir)?),
    }
    Ok(())
}
