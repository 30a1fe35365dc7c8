//! Seeded, parallel Monte Carlo replication and the estimators run on its output.

mod compare;
mod config;
mod estimate;
mod normality;
mod run;
mod sweep;

pub use compare::{compare_to_theory, DeviationRow, QuantityKind, Regime, BIAS_ALLOWANCE, Z_SCORE_FLAG};
pub use config::{ConfigError, ExperimentConfig};
pub use estimate::{estimate_moments, CoordinateShape, EstimateReport};
pub use normality::{normality_diagnostics, NormalityReport, MIN_NORMALITY_REPLICATES};
pub use run::{
    run_dimension, run_experiment, run_replicate, DimensionRun, RecordStatus, ReplicateRecord, FAILURE_BUDGET,
    TRACE_POWERS,
};
pub use sweep::{analyze_runs, convergence_sweep, CoordinateNormality, DimensionAnalysis, SweepRow, SweepTable, TrendSummary};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
    #[error("n = {n}: {failures} of {replicates} replicates failed, above the 1% budget")]
    FailureBudget { n: usize, failures: usize, replicates: usize },
    #[error("normality diagnostics need at least {needed} samples (got {got})")]
    TooFewSamples { needed: usize, got: usize },
    #[error("no replicates")]
    NoReplicates,
}
