//! Monte Carlo reproduction of the system-identification benchmark.

pub mod aggregate;
pub mod config;
pub mod csv;
pub mod trial;

pub use aggregate::{
    compensated_mean, curve_db, mse_db, run_monte_carlo, run_trials, AggregateResult, Aggregator,
    CompensatedSum,
};
pub use config::{ExperimentConfig, ModelKind, TestTarget, KEYS};
pub use csv::{emit_comparison, emit_csv, read_curve_csv};
pub use trial::{run_trial, run_trial_with, trial_rng, Learner, Stream, TrialResult, Workload};
