//! Finite-difference check of the analytic update directions.
//!
//! For each random configuration the update each rule applies with unit
//! step size (the analytic `−∂E/∂θ` for every weight and the bias) is
//! compared with a central difference of `E = ½(d − y)²`. The fractional
//! rule is checked with `α = 1`, where it must equal the conventional
//! gradient.
//!
//! Deviation is `|analytic − numeric| / max(|analytic|, |numeric|, 1e-3)`,
//! i.e. relative error with an absolute floor of `tolerance · 1e-3`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::harness::ModelKind;
use crate::kernels::Kernel;
use crate::learning::{frbf_step, gd_step_rbf, gd_step_strbf, instantaneous_cost, FrbfConfig, GdConfig};
use crate::model::{CenterGrid, RbfState, StRbfState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckConfig {
    /// Random configurations per model.
    pub configs: usize,
    pub seed: u64,
    /// Central-difference step.
    pub step: f64,
    pub tolerance: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            configs: 100,
            seed: 0,
            step: 1e-6,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub model: ModelKind,
    pub parameters_checked: usize,
    pub max_deviation: f64,
    /// Description of the worst parameter.
    pub worst: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub models: Vec<ModelReport>,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn max_deviation(&self) -> f64 {
        self.models.iter().map(|m| m.max_deviation).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }
}

pub fn deviation(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

/// Small random network: S ∈ [1,4], D ∈ [1,3], T ∈ [1,3], σ ∈ [0.5,2].
#[derive(Debug, Clone)]
struct Case {
    centers: CenterGrid,
    kernel: Kernel,
    lags: usize,
    warmup: Vec<Vec<f64>>,
    x: Vec<f64>,
    seed: u64,
}

fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let neurons = rng.random_range(1..=4);
    let dim = rng.random_range(1..=3);
    let lags = rng.random_range(1..=3);
    let vec_of = |n: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.5..1.5)).collect()
    };
    let centers = CenterGrid::from_flat(vec_of(neurons * dim, rng), neurons, dim).expect("valid grid");
    let kernel = Kernel::Gaussian {
        sigma: rng.random_range(0.5..=2.0),
    };
    let warmup = (0..rng.random_range(0..=4)).map(|_| vec_of(dim, rng)).collect();
    let x = vec_of(dim, rng);
    Case {
        centers,
        kernel,
        lags,
        warmup,
        x,
        seed: rng.random(),
    }
}

struct Tracker {
    report: ModelReport,
}

impl Tracker {
    fn new(model: ModelKind) -> Self {
        Tracker {
            report: ModelReport {
                model,
                parameters_checked: 0,
                max_deviation: 0.0,
                worst: String::new(),
            },
        }
    }

    fn record(&mut self, what: impl FnOnce() -> String, analytic: f64, numeric: f64) {
        let dev = deviation(analytic, numeric);
        self.report.parameters_checked += 1;
        if dev > self.report.max_deviation || self.report.worst.is_empty() {
            self.report.max_deviation = dev.max(self.report.max_deviation);
            self.report.worst = format!("{} (analytic {analytic:e}, numeric {numeric:e})", what());
        }
    }
}

/// Target `d = y + u` with `u ∈ [−1, 1]` keeps the cost O(1).
fn pick_target(y: f64, rng: &mut ChaCha8Rng) -> f64 {
    y + rng.random_range(-1.0..=1.0)
}

fn central<F: FnMut(f64) -> f64>(mut cost_at: F, p: f64, h: f64) -> f64 {
    -(cost_at(p + h) - cost_at(p - h)) / (2.0 * h)
}

fn check_rbf(case: &Case, cfg: &GradCheckConfig, fractional: bool, t: &mut Tracker, idx: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let state = RbfState::init(case.centers.clone(), case.kernel, &mut rng, 0.5).expect("valid state");
    let y = state.forward(&case.x).expect("dims");
    let d = pick_target(y, &mut rng);

    let mut stepped = state.clone();
    if fractional {
        let fc = FrbfConfig::new(1.0, 1.0, 1.0, 0.9).expect("valid frbf config");
        frbf_step(&mut stepped, &case.x, d, &fc).expect("finite step");
    } else {
        gd_step_rbf(&mut stepped, &case.x, d, &GdConfig { eta: 1.0 }).expect("finite step");
    }

    let cost = |s: &RbfState| instantaneous_cost(d, s.forward(&case.x).unwrap()).unwrap().cost;
    for i in 0..state.neurons() {
        let analytic = stepped.weights[i] - state.weights[i];
        let numeric = central(
            |p| {
                let mut s = state.clone();
                s.weights[i] = p;
                cost(&s)
            },
            state.weights[i],
            cfg.step,
        );
        t.record(|| format!("config {idx} weight {i}"), analytic, numeric);
    }
    let analytic = stepped.bias - state.bias;
    let numeric = central(
        |p| {
            let mut s = state.clone();
            s.bias = p;
            cost(&s)
        },
        state.bias,
        cfg.step,
    );
    t.record(|| format!("config {idx} bias"), analytic, numeric);
}

fn check_strbf(case: &Case, cfg: &GradCheckConfig, t: &mut Tracker, idx: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let mut state =
        StRbfState::init(case.centers.clone(), case.kernel, case.lags, &mut rng, 0.5).expect("valid state");
    for w in &case.warmup {
        state.push_and_forward(w).expect("dims");
    }
    // state after the push that produces y(k); perturbations act on it
    let mut pushed = state.clone();
    let y = pushed.push_and_forward(&case.x).expect("dims");
    let d = pick_target(y, &mut rng);

    let mut stepped = state.clone();
    gd_step_strbf(&mut stepped, &case.x, d, &GdConfig { eta: 1.0 }).expect("finite step");

    let cost = |s: &StRbfState| instantaneous_cost(d, s.output()).unwrap().cost;
    for i in 0..state.neurons() {
        for lag in 1..=state.lags() {
            let analytic = stepped.weight(i, lag) - state.weight(i, lag);
            let numeric = central(
                |p| {
                    let mut s = pushed.clone();
                    *s.weight_mut(i, lag) = p;
                    cost(&s)
                },
                pushed.weight(i, lag),
                cfg.step,
            );
            t.record(|| format!("config {idx} weight ({i},{lag})"), analytic, numeric);
        }
    }
    let analytic = stepped.bias - state.bias;
    let numeric = central(
        |p| {
            let mut s = pushed.clone();
            s.bias = p;
            cost(&s)
        },
        pushed.bias,
        cfg.step,
    );
    t.record(|| format!("config {idx} bias"), analytic, numeric);
}

pub fn run_gradcheck(cfg: &GradCheckConfig) -> GradCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cases: Vec<Case> = (0..cfg.configs).map(|_| random_case(&mut rng)).collect();
    let mut rbf = Tracker::new(ModelKind::Rbf);
    let mut frbf = Tracker::new(ModelKind::Frbf);
    let mut strbf = Tracker::new(ModelKind::Strbf);
    for (idx, case) in cases.iter().enumerate() {
        check_rbf(case, cfg, false, &mut rbf, idx);
        check_rbf(case, cfg, true, &mut frbf, idx);
        check_strbf(case, cfg, &mut strbf, idx);
    }
    GradCheckReport {
        models: vec![rbf.report, frbf.report, strbf.report],
        tolerance: cfg.tolerance,
    }
}
