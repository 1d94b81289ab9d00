//! Cross-trial averaging of squared-error curves.
//!
//! Curves are averaged in the linear (squared-error) domain with
//! Neumaier-compensated sums and only then converted to dB.

use rayon::prelude::*;

use super::config::{ExperimentConfig, ModelKind};
use super::trial::{run_trial_with, TrialResult, Workload};
use crate::error::{Error, Result};

/// Trials run in parallel within a chunk; chunks are reduced in index order.
const CHUNK: usize = 64;

/// `10·log10(m)`.
pub fn mse_db(m: f64) -> Result<f64> {
    if m.is_nan() || m <= 0.0 || m.is_infinite() {
        return Err(Error::invalid(format!("mse_db needs a positive finite MSE, got {m}")));
    }
    Ok(10.0 * m.log10())
}

/// Like [`mse_db`] but maps an exact zero to `-inf`, for curves.
pub fn curve_db(m: f64) -> f64 {
    if m == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * m.log10()
    }
}

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_mean(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    values.iter().for_each(|&v| acc.add(v));
    acc.value() / values.len() as f64
}

/// Order of operations recorded during aggregation.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditEvent {
    LinearAccumulate,
    DbConversion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub model: ModelKind,
    /// Pointwise mean of `e²(k)` over the trials used.
    pub mean_train_curve: Vec<f64>,
    pub mean_test_curve: Vec<f64>,
    pub mean_train_curve_db: Vec<f64>,
    pub mean_test_curve_db: Vec<f64>,
    /// Mean of the last 10% of the averaged training curve.
    pub final_train_mse: f64,
    pub final_train_mse_db: f64,
    /// Mean of the averaged test curve.
    pub mean_test_mse: f64,
    pub mean_test_mse_db: f64,
    pub trials_used: usize,
    pub diverged_count: usize,
    #[doc(hidden)]
    pub audit: Vec<AuditEvent>,
}

impl AggregateResult {
    /// True when every linear accumulation happened before any dB conversion.
    #[doc(hidden)]
    pub fn db_applied_after_averaging(&self) -> bool {
        let first_db = self
            .audit
            .iter()
            .position(|e| *e == AuditEvent::DbConversion)
            .unwrap_or(self.audit.len());
        !self.audit[first_db..].contains(&AuditEvent::LinearAccumulate)
    }
}

/// Streaming reducer over [`TrialResult`]s.
#[derive(Debug, Clone)]
pub struct Aggregator {
    model: ModelKind,
    train: Vec<CompensatedSum>,
    test: Vec<CompensatedSum>,
    used: usize,
    diverged: usize,
    audit: Vec<AuditEvent>,
}

impl Aggregator {
    pub fn new(model: ModelKind) -> Self {
        Aggregator {
            model,
            train: Vec::new(),
            test: Vec::new(),
            used: 0,
            diverged: 0,
            audit: Vec::new(),
        }
    }

    pub fn push(&mut self, trial: &TrialResult) -> Result<()> {
        if trial.diverged() {
            self.diverged += 1;
            return Ok(());
        }
        if self.used == 0 {
            self.train = vec![CompensatedSum::default(); trial.train_sq_err.len()];
            self.test = vec![CompensatedSum::default(); trial.test_sq_err.len()];
        } else if self.train.len() != trial.train_sq_err.len()
            || self.test.len() != trial.test_sq_err.len()
        {
            return Err(Error::invalid(format!(
                "trial {} curve lengths differ from earlier trials",
                trial.trial_index
            )));
        }
        for (acc, &v) in self.train.iter_mut().zip(&trial.train_sq_err) {
            acc.add(v);
        }
        for (acc, &v) in self.test.iter_mut().zip(&trial.test_sq_err) {
            acc.add(v);
        }
        self.used += 1;
        self.audit.push(AuditEvent::LinearAccumulate);
        Ok(())
    }

    pub fn finish(mut self) -> Result<AggregateResult> {
        if self.used == 0 {
            return Err(Error::AllTrialsDiverged {
                trials: self.diverged,
            });
        }
        let n = self.used as f64;
        let train: Vec<f64> = self.train.iter().map(|a| a.value() / n).collect();
        let test: Vec<f64> = self.test.iter().map(|a| a.value() / n).collect();

        let window = (train.len() / 10).max(1);
        let final_train_mse = compensated_mean(&train[train.len() - window..]);
        let mean_test_mse = if test.is_empty() { 0.0 } else { compensated_mean(&test) };

        self.audit.push(AuditEvent::DbConversion);
        Ok(AggregateResult {
            model: self.model,
            mean_train_curve_db: train.iter().map(|&m| curve_db(m)).collect(),
            mean_test_curve_db: test.iter().map(|&m| curve_db(m)).collect(),
            mean_train_curve: train,
            mean_test_curve: test,
            final_train_mse,
            final_train_mse_db: curve_db(final_train_mse),
            mean_test_mse,
            mean_test_mse_db: curve_db(mean_test_mse),
            trials_used: self.used,
            diverged_count: self.diverged,
            audit: self.audit,
        })
    }
}

/// Runs `cfg.trials` independent trials and averages their curves.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<AggregateResult> {
    let indices: Vec<u64> = (0..cfg.trials as u64).collect();
    run_trials(cfg, &indices)
}

/// Runs the given trial indices, aggregating in the order given.
pub fn run_trials(cfg: &ExperimentConfig, indices: &[u64]) -> Result<AggregateResult> {
    cfg.validate()?;
    let work = Workload::new(cfg)?;
    let mut agg = Aggregator::new(cfg.model);
    for chunk in indices.chunks(CHUNK) {
        let results: Vec<TrialResult> = chunk
            .par_iter()
            .map(|&i| run_trial_with(cfg, &work, i).map(|(r, _)| r))
            .collect::<Result<_>>()?;
        for r in &results {
            agg.push(r)?;
        }
    }
    agg.finish()
}
