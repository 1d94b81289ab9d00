//! Flat text snapshots of network state, one value per line.
//!
//! ```text
//! model = strbf            # rbf | strbf
//! neurons = 6
//! input_dim = 3
//! lags = 5                 # 1 for rbf
//! kernel = gaussian
//! sigma = 1e0              # gaussian only
//! zeta = 1e0               # inverse_multiquadric only
//! center.<i>.<j> = …       # neuron i, input dimension j
//! weight.<i>.<t> = …       # neuron i, lag t (1-based)
//! bias = …
//! samples_seen = …         # strbf only
//! activation.<t>.<i> = …   # strbf only; lag t (1-based), neuron i
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so parsing a snapshot
//! restores the state bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelKind};
use crate::model::{CenterGrid, RbfState, StRbfState};

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Rbf(RbfState),
    Strbf(StRbfState),
}

fn header(out: &mut String, model: &str, centers: &CenterGrid, lags: usize, kernel: &Kernel) {
    let _ = writeln!(out, "model = {model}");
    let _ = writeln!(out, "neurons = {}", centers.neurons());
    let _ = writeln!(out, "input_dim = {}", centers.dim());
    let _ = writeln!(out, "lags = {lags}");
    let _ = writeln!(out, "kernel = {}", KernelKind::from(*kernel));
    match kernel {
        Kernel::Gaussian { sigma } => {
            let _ = writeln!(out, "sigma = {sigma:e}");
        }
        Kernel::InverseMultiquadric { zeta } => {
            let _ = writeln!(out, "zeta = {zeta:e}");
        }
        Kernel::Multiquadric => {}
    }
    for (i, row) in centers.rows().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let _ = writeln!(out, "center.{i}.{j} = {c:e}");
        }
    }
}

impl Snapshot {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Snapshot::Rbf(s) => {
                header(&mut out, "rbf", &s.centers, 1, &s.kernel);
                for (i, w) in s.weights.iter().enumerate() {
                    let _ = writeln!(out, "weight.{i}.1 = {w:e}");
                }
                let _ = writeln!(out, "bias = {:e}", s.bias);
            }
            Snapshot::Strbf(s) => {
                header(&mut out, "strbf", &s.centers, s.lags(), &s.kernel);
                for i in 0..s.neurons() {
                    for t in 1..=s.lags() {
                        let _ = writeln!(out, "weight.{i}.{t} = {:e}", s.weight(i, t));
                    }
                }
                let _ = writeln!(out, "bias = {:e}", s.bias);
                let _ = writeln!(out, "samples_seen = {}", s.samples_seen);
                for t in 1..=s.lags() {
                    for (i, a) in s.buffer.lag(t).iter().enumerate() {
                        let _ = writeln!(out, "activation.{t}.{i} = {a:e}");
                    }
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map: HashMap<&str, &str> = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("snapshot line {}: expected `key = value`", n + 1)))?;
            if map.insert(k.trim(), v.trim()).is_some() {
                return Err(Error::invalid(format!("snapshot key `{}` repeated", k.trim())));
            }
        }
        let get = |k: &str| -> Result<&str> {
            map.get(k)
                .copied()
                .ok_or_else(|| Error::invalid(format!("snapshot is missing `{k}`")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|e| Error::invalid(format!("snapshot `{k}`: {e}")))
        };
        let count = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|e| Error::invalid(format!("snapshot `{k}`: {e}")))
        };

        let neurons = count("neurons")?;
        let dim = count("input_dim")?;
        let lags = count("lags")?;
        let kernel = match get("kernel")?.parse::<KernelKind>()? {
            KernelKind::Gaussian => Kernel::Gaussian { sigma: num("sigma")? },
            KernelKind::Multiquadric => Kernel::Multiquadric,
            KernelKind::InverseMultiquadric => Kernel::InverseMultiquadric { zeta: num("zeta")? },
        };
        let mut centers = Vec::with_capacity(neurons * dim);
        for i in 0..neurons {
            for j in 0..dim {
                centers.push(num(&format!("center.{i}.{j}"))?);
            }
        }
        let centers = CenterGrid::from_flat(centers, neurons, dim)?;
        let bias = num("bias")?;

        match get("model")? {
            "rbf" => {
                if lags != 1 {
                    return Err(Error::invalid("rbf snapshot must have lags = 1"));
                }
                let weights = (0..neurons)
                    .map(|i| num(&format!("weight.{i}.1")))
                    .collect::<Result<_>>()?;
                Ok(Snapshot::Rbf(RbfState::new(centers, kernel, weights, bias)?))
            }
            "strbf" => {
                let mut s = StRbfState::new(centers, kernel, lags, vec![0.0; neurons * lags], bias)?;
                for i in 0..neurons {
                    for t in 1..=lags {
                        *s.weight_mut(i, t) = num(&format!("weight.{i}.{t}"))?;
                    }
                }
                // oldest lag first so lag 1 ends up newest
                for t in (1..=lags).rev() {
                    let phi = (0..neurons)
                        .map(|i| num(&format!("activation.{t}.{i}")))
                        .collect::<Result<Vec<_>>>()?;
                    s.buffer.push(&phi)?;
                }
                s.samples_seen = get("samples_seen")?
                    .parse()
                    .map_err(|e| Error::invalid(format!("snapshot `samples_seen`: {e}")))?;
                Ok(Snapshot::Strbf(s))
            }
            other => Err(Error::invalid(format!("unknown snapshot model `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CenterRule;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rbf_snapshot_text() {
        let grid = CenterGrid::from_rows(&[vec![0.5], vec![-1.0]]).unwrap();
        let s = RbfState::new(grid, Kernel::default(), vec![0.25, -3.0], 0.1).unwrap();
        let text = Snapshot::Rbf(s.clone()).to_text();
        assert!(text.contains("model = rbf\n"));
        assert!(text.contains("weight.1.1 = -3e0\n"));
        assert!(text.contains("bias = 1e-1\n"));
        assert_eq!(Snapshot::parse(&text).unwrap(), Snapshot::Rbf(s));
    }

    #[test]
    fn parse_errors() {
        assert!(Snapshot::parse("model = rbf\n").is_err());
        assert!(Snapshot::parse("model rbf\n").is_err());
        assert!(Snapshot::parse("bias = 1\nbias = 2\n").is_err());
    }

    proptest! {
        #[test]
        fn strbf_snapshot_round_trips(seed in any::<u64>(), lags in 1usize..5, pushes in 0usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let grid = CenterRule::default().build(3).unwrap();
            let kernel = if seed % 2 == 0 { Kernel::Gaussian { sigma: 0.8 } } else { Kernel::InverseMultiquadric { zeta: 1.5 } };
            let mut s = StRbfState::init(grid, kernel, lags, &mut rng, 0.3).unwrap();
            for k in 0..pushes {
                s.push_and_forward(&[k as f64 * 0.3 - 1.0, 0.5, -0.2]).unwrap();
            }
            let back = Snapshot::parse(&Snapshot::Strbf(s.clone()).to_text()).unwrap();
            let Snapshot::Strbf(b) = back else { panic!("wrong model") };
            prop_assert_eq!(&b.weights, &s.weights);
            prop_assert_eq!(b.bias, s.bias);
            prop_assert_eq!(b.samples_seen, s.samples_seen);
            for t in 1..=lags {
                prop_assert_eq!(b.buffer.lag(t), s.buffer.lag(t));
            }
            // same future behaviour
            let mut s2 = s.clone();
            let mut b2 = b.clone();
            prop_assert_eq!(s2.push_and_forward(&[0.1, 0.2, 0.3]).unwrap(), b2.push_and_forward(&[0.1, 0.2, 0.3]).unwrap());
        }
    }
}
