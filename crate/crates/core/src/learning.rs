//! Instantaneous cost and online parameter updates.
//!
//! All three rules compute `y` and `e = d − y` from the pre-update
//! parameters, then move the weights along `e·φ` and the bias along `e`.
//!
//! The fractional rule mixes a conventional step with a fractional-order
//! term:
//!
//! ```text
//! w_i ← w_i + α η e φ_i + (1 − α) η_v e φ_i |w_i|^(1−ν) / Γ(2 − ν)
//! b   ← b + η e
//! ```
//!
//! The absolute value keeps the power real for negative weights. The bias
//! only takes the conventional step.

use crate::error::{check_dim, Error, Result};
use crate::model::{activations_into, RbfState, StRbfState};

// Negative control for the gradient checker: flips the update direction.
#[cfg(not(feature = "sign-flip-fault"))]
const DIRECTION_SIGN: f64 = 1.0;
#[cfg(feature = "sign-flip-fault")]
const DIRECTION_SIGN: f64 = -1.0;

/// Output, error and cost of one sample, all from pre-update parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub y: f64,
    pub e: f64,
    pub cost: f64,
}

impl StepResult {
    pub fn squared_error(&self) -> f64 {
        self.e * self.e
    }
}

/// `e = d − y`, `cost = ½e²`.
pub fn instantaneous_cost(d: f64, y: f64) -> Result<StepResult> {
    if !d.is_finite() || !y.is_finite() {
        return Err(Error::invalid(format!(
            "cost needs finite target and output, got d={d} y={y}"
        )));
    }
    let e = d - y;
    Ok(StepResult {
        y,
        e,
        cost: 0.5 * e * e,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdConfig {
    pub eta: f64,
}

impl GdConfig {
    /// `eta = 0` is accepted so a run can be frozen at its initialization.
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::invalid(format!("step size must be finite and >= 0, got {eta}")));
        }
        Ok(GdConfig { eta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrbfConfig {
    pub eta: f64,
    pub eta_v: f64,
    pub alpha: f64,
    pub nu: f64,
    /// `Γ(2 − ν)`, cached.
    pub gamma_factor: f64,
}

impl FrbfConfig {
    pub fn new(eta: f64, eta_v: f64, alpha: f64, nu: f64) -> Result<Self> {
        GdConfig::new(eta)?;
        GdConfig::new(eta_v)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::invalid(format!("nu must lie in (0, 1), got {nu}")));
        }
        Ok(FrbfConfig {
            eta,
            eta_v,
            alpha,
            nu,
            gamma_factor: statrs::function::gamma::gamma(2.0 - nu),
        })
    }

    /// Fractional increment factor `|w|^(1−ν) / Γ(2 − ν)`.
    #[inline]
    pub fn fractional_gain(&self, w: f64) -> f64 {
        w.abs().powf(1.0 - self.nu) / self.gamma_factor
    }
}

fn finite_or_diverged(ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::NonFiniteUpdate)
    }
}

/// Conventional gradient step on a plain RBF network.
pub fn gd_step_rbf(state: &mut RbfState, x: &[f64], d: f64, cfg: &GdConfig) -> Result<StepResult> {
    let phi = state.activations(x)?;
    gd_step_rbf_with(state, &phi, d, cfg)
}

pub(crate) fn gd_step_rbf_with(
    state: &mut RbfState,
    phi: &[f64],
    d: f64,
    cfg: &GdConfig,
) -> Result<StepResult> {
    let step = instantaneous_cost(d, state.output_from(phi))?;
    let g = cfg.eta * DIRECTION_SIGN * step.e;
    for (w, p) in state.weights.iter_mut().zip(phi) {
        *w += g * p;
    }
    state.bias += g;
    finite_or_diverged(state.is_finite())?;
    Ok(step)
}

/// Pushes `x` into the delay line, then takes a conventional gradient step
/// using the same buffer contents that produced `y`.
pub fn gd_step_strbf(
    state: &mut StRbfState,
    x: &[f64],
    d: f64,
    cfg: &GdConfig,
) -> Result<StepResult> {
    let y = state.push_and_forward(x)?;
    let step = instantaneous_cost(d, y)?;
    let g = cfg.eta * DIRECTION_SIGN * step.e;
    let s = state.neurons();
    for t in 1..=state.lags() {
        let w = &mut state.weights[(t - 1) * s..t * s];
        for (w, p) in w.iter_mut().zip(state.buffer.lag(t)) {
            *w += g * p;
        }
    }
    state.bias += g;
    finite_or_diverged(state.is_finite())?;
    Ok(step)
}

/// Fractional-gradient step on a plain RBF network.
pub fn frbf_step(state: &mut RbfState, x: &[f64], d: f64, cfg: &FrbfConfig) -> Result<StepResult> {
    let phi = state.activations(x)?;
    frbf_step_with(state, &phi, d, cfg)
}

pub(crate) fn frbf_step_with(
    state: &mut RbfState,
    phi: &[f64],
    d: f64,
    cfg: &FrbfConfig,
) -> Result<StepResult> {
    let step = instantaneous_cost(d, state.output_from(phi))?;
    let e = DIRECTION_SIGN * step.e;
    let conventional = cfg.alpha * cfg.eta * e;
    let fractional = (1.0 - cfg.alpha) * cfg.eta_v * e;
    for (w, p) in state.weights.iter_mut().zip(phi) {
        let inc = conventional * p + fractional * p * cfg.fractional_gain(*w);
        *w += inc;
    }
    state.bias += cfg.eta * e;
    finite_or_diverged(state.is_finite())?;
    Ok(step)
}

/// Scratch space for the per-sample activation vector, so hot loops over a
/// plain RBF network do not allocate.
#[derive(Debug, Clone)]
pub struct PhiScratch(Vec<f64>);

impl PhiScratch {
    pub(crate) fn new(neurons: usize) -> Self {
        PhiScratch(vec![0.0; neurons])
    }

    pub(crate) fn fill(&mut self, state: &RbfState, x: &[f64]) -> Result<&[f64]> {
        check_dim(state.input_dim(), x.len())?;
        activations_into(&state.centers, &state.kernel, x, &mut self.0);
        Ok(&self.0)
    }
}
