//! Online training of conventional, fractional-gradient and
//! spatio-temporal radial basis function networks, with a Monte Carlo
//! harness for a nonlinear system-identification benchmark.
//!
//! - [`kernels`]: radial basis functions on squared distances.
//! - [`model`]: network state and forward mappings.
//! - [`learning`]: instantaneous cost and the three update rules.
//! - [`plant`]: benchmark plant, noise and square-wave signals.
//! - [`harness`]: trials, Monte Carlo aggregation and CSV export.
//! - [`gradcheck`]: finite-difference verification of the update rules.

pub mod error;
pub mod gradcheck;
pub mod harness;
pub mod kernels;
pub mod learning;
pub mod model;
pub mod plant;
pub mod snapshot;

pub use error::{Error, Result};
pub use harness::{
    emit_comparison, emit_csv, mse_db, run_monte_carlo, run_trial, AggregateResult,
    ExperimentConfig, ModelKind, TestTarget, TrialResult,
};
pub use kernels::{squared_distance, Kernel, KernelKind};
pub use learning::{
    frbf_step, gd_step_rbf, gd_step_strbf, instantaneous_cost, FrbfConfig, GdConfig, StepResult,
};
pub use model::{activations, CenterGrid, CenterRule, InputWindow, RbfState, StRbfState};
pub use plant::{gaussian_noise, gen_square, plant_output, run_plant, NoiseSpec, PlantCoeffs, SignalSpec};
pub use snapshot::Snapshot;
