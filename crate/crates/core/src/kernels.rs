//! Radial basis functions evaluated on squared input–center distances.
//!
//! Kernels take `‖x − c‖²` rather than the raw vectors so a network computes
//! each neuron's distance once and every variant consumes it directly.
//!
//! The multiquadric is the bare distance `(‖x − c‖²)^½` with no offset term,
//! unlike the classical Hardy form `(‖x − c‖² + c²)^½`.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};

/// Radial basis function variant with its shape parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `exp(−r² / σ²)`
    Gaussian { sigma: f64 },
    /// `(r²)^½`
    Multiquadric,
    /// `(r² + ζ²)^−½`
    InverseMultiquadric { zeta: f64 },
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Gaussian { sigma: 1.0 }
    }
}

impl Kernel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let k = Kernel::Gaussian { sigma };
        k.validate()?;
        Ok(k)
    }

    pub fn inverse_multiquadric(zeta: f64) -> Result<Self> {
        let k = Kernel::InverseMultiquadric { zeta };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::invalid(format!("gaussian sigma must be positive and finite, got {sigma}")),
            ),
            Kernel::InverseMultiquadric { zeta } if !(zeta > 0.0 && zeta.is_finite()) => {
                Err(Error::invalid(format!(
                    "inverse multiquadric zeta must be positive and finite, got {zeta}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the kernel at squared distance `sq_dist`.
    pub fn eval(&self, sq_dist: f64) -> Result<f64> {
        if sq_dist.is_nan() || sq_dist < 0.0 {
            return Err(Error::invalid(format!(
                "squared distance must be non-negative, got {sq_dist}"
            )));
        }
        Ok(self.eval_unchecked(sq_dist))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, sq_dist: f64) -> f64 {
        match *self {
            Kernel::Gaussian { sigma } => (-sq_dist / (sigma * sigma)).exp(),
            Kernel::Multiquadric => sq_dist.sqrt(),
            Kernel::InverseMultiquadric { zeta } => 1.0 / (sq_dist + zeta * zeta).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Gaussian { .. } => "gaussian",
            Kernel::Multiquadric => "multiquadric",
            Kernel::InverseMultiquadric { .. } => "inverse_multiquadric",
        }
    }
}

/// Kernel family without its parameter, as named in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Gaussian,
    Multiquadric,
    InverseMultiquadric,
}

impl KernelKind {
    pub fn with_params(self, sigma: f64, zeta: f64) -> Kernel {
        match self {
            KernelKind::Gaussian => Kernel::Gaussian { sigma },
            KernelKind::Multiquadric => Kernel::Multiquadric,
            KernelKind::InverseMultiquadric => Kernel::InverseMultiquadric { zeta },
        }
    }
}

impl From<Kernel> for KernelKind {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Gaussian { .. } => KernelKind::Gaussian,
            Kernel::Multiquadric => KernelKind::Multiquadric,
            Kernel::InverseMultiquadric { .. } => KernelKind::InverseMultiquadric,
        }
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(KernelKind::Gaussian),
            "multiquadric" => Ok(KernelKind::Multiquadric),
            "inverse_multiquadric" | "inverse-multiquadric" => {
                Ok(KernelKind::InverseMultiquadric)
            }
            other => Err(Error::invalid(format!("unknown kernel `{other}`"))),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Gaussian => "gaussian",
            KernelKind::Multiquadric => "multiquadric",
            KernelKind::InverseMultiquadric => "inverse_multiquadric",
        })
    }
}

/// `Σ_j (x_j − c_j)²`.
pub fn squared_distance(x: &[f64], c: &[f64]) -> Result<f64> {
    check_dim(c.len(), x.len())?;
    if x.is_empty() {
        return Err(Error::invalid("vectors must have at least one element"));
    }
    Ok(squared_distance_unchecked(x, c))
}

#[inline]
pub(crate) fn squared_distance_unchecked(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}
