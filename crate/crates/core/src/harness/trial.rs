//! One Monte Carlo trial: initialize, train online, freeze, test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, ModelKind, TestTarget};
use crate::error::{Error, Result};
use crate::learning::{
    frbf_step_with, gd_step_rbf_with, gd_step_strbf, FrbfConfig, GdConfig, PhiScratch, StepResult,
};
use crate::model::{InputWindow, RbfState, StRbfState};
use crate::plant::{add_noise, gen_square, run_plant_clean};
use crate::snapshot::Snapshot;

/// Independent random streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init = 0,
    TrainNoise = 1,
    TestNoise = 2,
}

/// Generator for `stream` of trial `trial_index`.
///
/// Splitting rule: the ChaCha8 key comes from `base_seed`, and the stream
/// number is `3 · trial_index + stream`. Any trial can be replayed on its own,
/// and every model in a comparison sees the same noise for a given trial.
pub fn trial_rng(base_seed: u64, trial_index: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial_index.wrapping_mul(3).wrapping_add(stream as u64));
    rng
}

/// A network together with the update rule it is trained with.
#[derive(Debug, Clone)]
pub enum Learner {
    Rbf {
        state: RbfState,
        cfg: GdConfig,
        phi: PhiScratch,
    },
    Frbf {
        state: RbfState,
        cfg: FrbfConfig,
        phi: PhiScratch,
    },
    Strbf {
        state: StRbfState,
        cfg: GdConfig,
    },
}

impl Learner {
    /// Fresh learner for `cfg`, parameters drawn from `rng`.
    pub fn init(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Self> {
        let centers = cfg.center_grid()?;
        let kernel = cfg.kernel();
        Ok(match cfg.model {
            ModelKind::Rbf => {
                let state = RbfState::init(centers, kernel, rng, cfg.init_scale)?;
                Learner::Rbf {
                    phi: PhiScratch::new(state.neurons()),
                    state,
                    cfg: cfg.gd()?,
                }
            }
            ModelKind::Frbf => {
                let state = RbfState::init(centers, kernel, rng, cfg.init_scale)?;
                Learner::Frbf {
                    phi: PhiScratch::new(state.neurons()),
                    state,
                    cfg: cfg.frbf()?.expect("frbf model has fractional config"),
                }
            }
            ModelKind::Strbf => Learner::Strbf {
                state: StRbfState::init(centers, kernel, cfg.lags, rng, cfg.init_scale)?,
                cfg: cfg.gd()?,
            },
        })
    }

    pub fn train_step(&mut self, x: &[f64], d: f64) -> Result<StepResult> {
        match self {
            Learner::Rbf { state, cfg, phi } => {
                let p = phi.fill(state, x)?;
                gd_step_rbf_with(state, p, d, cfg)
            }
            Learner::Frbf { state, cfg, phi } => {
                let p = phi.fill(state, x)?;
                frbf_step_with(state, p, d, cfg)
            }
            Learner::Strbf { state, cfg } => gd_step_strbf(state, x, d, cfg),
        }
    }

    /// Output with frozen parameters. Still advances the ST delay line.
    pub fn predict(&mut self, x: &[f64]) -> Result<f64> {
        match self {
            Learner::Rbf { state, .. } | Learner::Frbf { state, .. } => state.forward(x),
            Learner::Strbf { state, .. } => state.push_and_forward(x),
        }
    }

    pub fn reset_buffer(&mut self) {
        if let Learner::Strbf { state, .. } = self {
            state.reset_buffer();
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        match self {
            Learner::Rbf { state, .. } | Learner::Frbf { state, .. } => Snapshot::Rbf(state.clone()),
            Learner::Strbf { state, .. } => Snapshot::Strbf(state.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: u64,
    /// `e²(k)` for every training sample of every epoch.
    pub train_sq_err: Vec<f64>,
    /// `e²(k)` over the test signal with frozen parameters.
    pub test_sq_err: Vec<f64>,
    /// Global training iteration at which a parameter became non-finite.
    pub diverged_at: Option<u64>,
}

impl TrialResult {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

/// Signals and clean plant responses shared by every trial of a config.
#[derive(Debug, Clone)]
pub struct Workload {
    pub train_input: Vec<f64>,
    pub train_clean: Vec<f64>,
    pub test_input: Vec<f64>,
    pub test_clean: Vec<f64>,
}

impl Workload {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let train_input = gen_square(&cfg.train_signal)?;
        let test_input = gen_square(&cfg.test_signal)?;
        Ok(Workload {
            train_clean: run_plant_clean(&cfg.plant, &train_input)?,
            test_clean: run_plant_clean(&cfg.plant, &test_input)?,
            train_input,
            test_input,
        })
    }
}

pub fn run_trial(cfg: &ExperimentConfig, trial_index: u64) -> Result<TrialResult> {
    cfg.validate()?;
    let work = Workload::new(cfg)?;
    run_trial_with(cfg, &work, trial_index).map(|(r, _)| r)
}

/// Runs one trial and also returns the learner as it stood after training
/// (or at the point of divergence).
pub fn run_trial_with(
    cfg: &ExperimentConfig,
    work: &Workload,
    trial_index: u64,
) -> Result<(TrialResult, Learner)> {
    let mut learner = Learner::init(cfg, &mut trial_rng(cfg.base_seed, trial_index, Stream::Init))?;
    let mut train_noise = trial_rng(cfg.base_seed, trial_index, Stream::TrainNoise);
    let mut window = InputWindow::new(cfg.input_dim);

    let n = work.train_input.len();
    let mut train_sq_err = Vec::with_capacity(cfg.epochs * n);
    let mut iteration = 0u64;
    for _ in 0..cfg.epochs {
        window.reset();
        learner.reset_buffer();
        let targets = add_noise(work.train_clean.clone(), &cfg.noise, &mut train_noise)?;
        for (&r, &d) in work.train_input.iter().zip(&targets) {
            window.push(r);
            match learner.train_step(window.as_slice(), d) {
                Ok(step) => train_sq_err.push(step.squared_error()),
                Err(Error::NonFiniteUpdate) => {
                    let result = TrialResult {
                        trial_index,
                        train_sq_err,
                        test_sq_err: Vec::new(),
                        diverged_at: Some(iteration),
                    };
                    return Ok((result, learner));
                }
                Err(e) => return Err(e),
            }
            iteration += 1;
        }
    }

    let targets = match cfg.test_target {
        TestTarget::Clean => work.test_clean.clone(),
        TestTarget::Noisy => add_noise(
            work.test_clean.clone(),
            &cfg.noise,
            &mut trial_rng(cfg.base_seed, trial_index, Stream::TestNoise),
        )?,
    };
    let frozen = learner.clone();
    learner.reset_buffer();
    window.reset();
    let mut test_sq_err = Vec::with_capacity(targets.len());
    for (&r, &d) in work.test_input.iter().zip(&targets) {
        window.push(r);
        let e = d - learner.predict(window.as_slice())?;
        test_sq_err.push(e * e);
    }
    Ok((
        TrialResult {
            trial_index,
            train_sq_err,
            test_sq_err,
            diverged_at: None,
        },
        frozen,
    ))
}
