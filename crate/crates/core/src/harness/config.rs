//! Experiment configuration and its flat `key = value` text form.
//!
//! Every field of [`ExperimentConfig`] has exactly one key (see [`KEYS`]).
//! Values are applied in order; later assignments win.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelKind};
use crate::model::CenterGrid;
use crate::learning::{FrbfConfig, GdConfig};
use crate::model::CenterRule;
use crate::plant::{NoiseSpec, PlantCoeffs, SignalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Rbf,
    Frbf,
    Strbf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Rbf, ModelKind::Frbf, ModelKind::Strbf];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Rbf => "rbf",
            ModelKind::Frbf => "frbf",
            ModelKind::Strbf => "strbf",
        }
    }

    /// Train/test MSE (dB) published for the benchmark at 1000 trials.
    pub fn reference_db(&self) -> (f64, f64) {
        match self {
            ModelKind::Rbf => (-1.6813, -4.431),
            ModelKind::Frbf => (-1.7444, -4.955),
            ModelKind::Strbf => (-15.1286, -19.67),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rbf" => Ok(ModelKind::Rbf),
            "frbf" => Ok(ModelKind::Frbf),
            "strbf" | "st-rbf" | "st_rbf" => Ok(ModelKind::Strbf),
            other => Err(Error::invalid(format!(
                "unknown model `{other}` (expected rbf, frbf or strbf)"
            ))),
        }
    }
}

/// Whether test errors are scored against the clean or the noisy plant
/// output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestTarget {
    Clean,
    Noisy,
}

impl fmt::Display for TestTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestTarget::Clean => "clean",
            TestTarget::Noisy => "noisy",
        })
    }
}

impl FromStr for TestTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clean" => Ok(TestTarget::Clean),
            "noisy" => Ok(TestTarget::Noisy),
            other => Err(Error::invalid(format!(
                "unknown test target `{other}` (expected clean or noisy)"
            ))),
        }
    }
}

/// Default step size for RBF and FRBF.
pub const DEFAULT_ETA_RBF: f64 = 2e-5;
/// Default step size for the spatio-temporal network.
pub const DEFAULT_ETA_STRBF: f64 = 1e-2;
/// Default truncated time for the spatio-temporal network.
pub const DEFAULT_LAGS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub neurons: usize,
    pub input_dim: usize,
    /// Truncated time `T`; always 1 for RBF and FRBF.
    pub lags: usize,
    pub kernel: KernelKind,
    /// Gaussian spread.
    pub sigma: f64,
    /// Inverse-multiquadric offset.
    pub zeta: f64,
    pub centers: CenterRule,
    pub eta: f64,
    /// Fractional step size, used by FRBF only.
    pub eta_v: f64,
    /// Convex mixing weight between conventional and fractional steps.
    pub alpha: f64,
    /// Fractional order.
    pub nu: f64,
    pub epochs: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub init_scale: f64,
    pub plant: PlantCoeffs,
    pub noise: NoiseSpec,
    pub train_signal: SignalSpec,
    pub test_signal: SignalSpec,
    pub test_target: TestTarget,
    /// Trailing moving-average window for the optional smoothed CSV column;
    /// 0 disables it.
    pub ma_window: usize,
}

pub const KEYS: &[&str] = &[
    "model",
    "neurons",
    "input_dim",
    "lags",
    "kernel",
    "sigma",
    "zeta",
    "centers",
    "eta",
    "eta_v",
    "alpha",
    "nu",
    "epochs",
    "trials",
    "seed",
    "init_scale",
    "q1",
    "q2",
    "q3",
    "q4",
    "q5",
    "noise_variance",
    "train_length",
    "train_half_period",
    "train_amplitude",
    "test_length",
    "test_half_period",
    "test_amplitude",
    "test_target",
    "ma_window",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::benchmark_defaults(ModelKind::Strbf)
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse `{}`: {e}", value.trim())))
}

fn parse_centers(key: &str, value: &str) -> Result<CenterRule> {
    let v = value.trim();
    let nums = |parts: Vec<&str>| -> Result<Vec<f64>> {
        parts.into_iter().map(|p| parse_num::<f64>(key, p)).collect()
    };
    if v.contains(':') {
        let parts = nums(v.split(':').collect())?;
        match parts[..] {
            [lo, hi, step] => Ok(CenterRule::ScalarRange { lo, hi, step }),
            _ => Err(Error::config(key, "range form is lo:hi:step")),
        }
    } else {
        Ok(CenterRule::Explicit(nums(v.split(',').collect())?))
    }
}

fn fmt_centers(rule: &CenterRule) -> String {
    match rule {
        CenterRule::ScalarRange { lo, hi, step } => format!("{lo}:{hi}:{step}"),
        CenterRule::Explicit(v) => v
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(","),
    }
}

impl ExperimentConfig {
    /// Benchmark architecture and tuning for `model`.
    pub fn benchmark_defaults(model: ModelKind) -> Self {
        let (eta, lags) = match model {
            ModelKind::Rbf | ModelKind::Frbf => (DEFAULT_ETA_RBF, 1),
            ModelKind::Strbf => (DEFAULT_ETA_STRBF, DEFAULT_LAGS),
        };
        ExperimentConfig {
            model,
            neurons: 6,
            input_dim: 3,
            lags,
            kernel: KernelKind::Gaussian,
            sigma: 1.0,
            zeta: 1.0,
            centers: CenterRule::default(),
            eta,
            eta_v: DEFAULT_ETA_RBF,
            alpha: 0.5,
            nu: 0.9,
            epochs: 1,
            trials: 1000,
            base_seed: 0,
            init_scale: 0.1,
            plant: PlantCoeffs::default(),
            noise: NoiseSpec::default(),
            train_signal: SignalSpec::training(),
            test_signal: SignalSpec::testing(),
            test_target: TestTarget::Clean,
            ma_window: 0,
        }
    }

    /// Builds a config from ordered `key = value` assignments on top of the
    /// defaults of the model they select (the last `model` assignment, else
    /// `model_override`, else STRBF). `model_override` wins over assignments
    /// when given.
    pub fn resolve<K: AsRef<str>, V: AsRef<str>>(
        assignments: &[(K, V)],
        model_override: Option<ModelKind>,
    ) -> Result<Self> {
        let mut model = ModelKind::Strbf;
        for (k, v) in assignments {
            if k.as_ref().trim() == "model" {
                model = v.as_ref().parse().map_err(|e: Error| Error::config("model", e.to_string()))?;
            }
        }
        if let Some(m) = model_override {
            model = m;
        }
        let mut cfg = Self::benchmark_defaults(model);
        for (k, v) in assignments {
            let key = k.as_ref().trim();
            if key == "model" {
                continue;
            }
            cfg.set(key, v.as_ref())?;
        }
        cfg.normalize();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Assigns one field by key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let wrap = |r: Result<()>| {
            r.map_err(|e| match e {
                Error::Config { .. } => e,
                other => Error::config(key, other.to_string()),
            })
        };
        wrap(self.set_inner(key, value))
    }

    fn set_inner(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "model" => self.model = v.parse()?,
            "neurons" => self.neurons = parse_num(key, v)?,
            "input_dim" => self.input_dim = parse_num(key, v)?,
            "lags" => self.lags = parse_num(key, v)?,
            "kernel" => self.kernel = v.parse()?,
            "sigma" => self.sigma = parse_num(key, v)?,
            "zeta" => self.zeta = parse_num(key, v)?,
            "centers" => self.centers = parse_centers(key, v)?,
            "eta" => self.eta = parse_num(key, v)?,
            "eta_v" => self.eta_v = parse_num(key, v)?,
            "alpha" => self.alpha = parse_num(key, v)?,
            "nu" => self.nu = parse_num(key, v)?,
            "epochs" => self.epochs = parse_num(key, v)?,
            "trials" => self.trials = parse_num(key, v)?,
            "seed" => self.base_seed = parse_num(key, v)?,
            "init_scale" => self.init_scale = parse_num(key, v)?,
            "q1" => self.plant.q1 = parse_num(key, v)?,
            "q2" => self.plant.q2 = parse_num(key, v)?,
            "q3" => self.plant.q3 = parse_num(key, v)?,
            "q4" => self.plant.q4 = parse_num(key, v)?,
            "q5" => self.plant.q5 = parse_num(key, v)?,
            "noise_variance" => self.noise.variance = parse_num(key, v)?,
            "train_length" => self.train_signal.length = parse_num(key, v)?,
            "train_half_period" => self.train_signal.half_period = parse_num(key, v)?,
            "train_amplitude" => self.train_signal.amplitude = parse_num(key, v)?,
            "test_length" => self.test_signal.length = parse_num(key, v)?,
            "test_half_period" => self.test_signal.half_period = parse_num(key, v)?,
            "test_amplitude" => self.test_signal.amplitude = parse_num(key, v)?,
            "test_target" => self.test_target = v.parse()?,
            "ma_window" => self.ma_window = parse_num(key, v)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }
}

impl ExperimentConfig {
    /// Forces `T = 1` for the models without a temporal axis.
    pub fn normalize(&mut self) {
        if self.model != ModelKind::Strbf {
            self.lags = 1;
        }
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel.with_params(self.sigma, self.zeta)
    }

    pub fn center_grid(&self) -> Result<CenterGrid> {
        let grid = self
            .centers
            .build(self.input_dim)
            .map_err(|e| Error::config("centers", e.to_string()))?;
        if grid.neurons() != self.neurons {
            return Err(Error::config(
                "neurons",
                format!(
                    "{} neurons but the center rule yields {} centers",
                    self.neurons,
                    grid.neurons()
                ),
            ));
        }
        Ok(grid)
    }

    pub fn gd(&self) -> Result<GdConfig> {
        GdConfig::new(self.eta).map_err(|e| Error::config("eta", e.to_string()))
    }

    /// Fractional-rule parameters; `None` unless the model is FRBF.
    pub fn frbf(&self) -> Result<Option<FrbfConfig>> {
        if self.model != ModelKind::Frbf {
            return Ok(None);
        }
        FrbfConfig::new(self.eta, self.eta_v, self.alpha, self.nu)
            .map(Some)
            .map_err(|e| Error::config("eta_v/alpha/nu", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: usize| {
            if v == 0 {
                Err(Error::config(key, "must be >= 1"))
            } else {
                Ok(())
            }
        };
        positive("neurons", self.neurons)?;
        positive("input_dim", self.input_dim)?;
        positive("lags", self.lags)?;
        positive("epochs", self.epochs)?;
        positive("trials", self.trials)?;
        if self.model != ModelKind::Strbf && self.lags != 1 {
            return Err(Error::config("lags", "rbf and frbf use exactly one lag"));
        }
        self.kernel()
            .validate()
            .map_err(|e| Error::config(if self.kernel == KernelKind::Gaussian { "sigma" } else { "zeta" }, e.to_string()))?;
        self.center_grid()?;
        self.gd()?;
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::config("init_scale", "must be finite and >= 0"));
        }
        self.frbf()?;
        // keep the fractional parameters valid for every model so a shared
        // config file works across a comparison
        FrbfConfig::new(self.eta, self.eta_v, self.alpha, self.nu)
            .map_err(|e| Error::config("eta_v/alpha/nu", e.to_string()))?;
        self.plant
            .validate()
            .map_err(|e| Error::config("q1..q5", e.to_string()))?;
        self.noise
            .validate()
            .map_err(|e| Error::config("noise_variance", e.to_string()))?;
        self.train_signal
            .validate()
            .map_err(|e| Error::config("train_length/train_half_period", e.to_string()))?;
        self.test_signal
            .validate()
            .map_err(|e| Error::config("test_length/test_half_period", e.to_string()))?;
        Ok(())
    }

    /// Every key with its current value, one `key = value` per line, in
    /// [`KEYS`] order. Parsing this text back yields an equal config.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("known key"));
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "model" => self.model.to_string(),
            "neurons" => self.neurons.to_string(),
            "input_dim" => self.input_dim.to_string(),
            "lags" => self.lags.to_string(),
            "kernel" => self.kernel.to_string(),
            "sigma" => self.sigma.to_string(),
            "zeta" => self.zeta.to_string(),
            "centers" => fmt_centers(&self.centers),
            "eta" => self.eta.to_string(),
            "eta_v" => self.eta_v.to_string(),
            "alpha" => self.alpha.to_string(),
            "nu" => self.nu.to_string(),
            "epochs" => self.epochs.to_string(),
            "trials" => self.trials.to_string(),
            "seed" => self.base_seed.to_string(),
            "init_scale" => self.init_scale.to_string(),
            "q1" => self.plant.q1.to_string(),
            "q2" => self.plant.q2.to_string(),
            "q3" => self.plant.q3.to_string(),
            "q4" => self.plant.q4.to_string(),
            "q5" => self.plant.q5.to_string(),
            "noise_variance" => self.noise.variance.to_string(),
            "train_length" => self.train_signal.length.to_string(),
            "train_half_period" => self.train_signal.half_period.to_string(),
            "train_amplitude" => self.train_signal.amplitude.to_string(),
            "test_length" => self.test_signal.length.to_string(),
            "test_half_period" => self.test_signal.half_period.to_string(),
            "test_amplitude" => self.test_signal.amplitude.to_string(),
            "test_target" => self.test_target.to_string(),
            "ma_window" => self.ma_window.to_string(),
            _ => return None,
        })
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped. Unknown keys are rejected with their line number.
pub fn parse_assignments(text: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = k.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: format!("unknown config key `{key}`"),
            });
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn load_assignments(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_assignments(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_model() {
        let r = ExperimentConfig::benchmark_defaults(ModelKind::Rbf);
        assert_eq!((r.eta, r.lags, r.neurons, r.input_dim), (2e-5, 1, 6, 3));
        assert!(r.frbf().unwrap().is_none());
        let f = ExperimentConfig::benchmark_defaults(ModelKind::Frbf);
        let fc = f.frbf().unwrap().unwrap();
        assert_eq!((fc.eta, fc.eta_v, fc.alpha, fc.nu), (2e-5, 2e-5, 0.5, 0.9));
        let s = ExperimentConfig::benchmark_defaults(ModelKind::Strbf);
        assert_eq!((s.eta, s.lags), (1e-2, 5));
        assert_eq!(s.noise.variance, 0.1);
        assert_eq!(s.trials, 1000);
        assert_eq!(s.test_target, TestTarget::Clean);
        assert_eq!(s.kernel(), Kernel::Gaussian { sigma: 1.0 });
        for m in ModelKind::ALL {
            ExperimentConfig::benchmark_defaults(m).validate().unwrap();
        }
    }

    #[test]
    fn resolve_applies_model_defaults_then_overrides() {
        let a = [("eta", "0.5"), ("model", "rbf"), ("lags", "7")];
        let c = ExperimentConfig::resolve(&a, None).unwrap();
        assert_eq!(c.model, ModelKind::Rbf);
        assert_eq!(c.eta, 0.5);
        assert_eq!(c.lags, 1);

        let c = ExperimentConfig::resolve(&a, Some(ModelKind::Strbf)).unwrap();
        assert_eq!((c.model, c.lags), (ModelKind::Strbf, 7));

        let c = ExperimentConfig::resolve(&[("model", "frbf")], None).unwrap();
        assert_eq!(c.eta, DEFAULT_ETA_RBF);
    }

    #[test]
    fn bad_values_name_their_key() {
        let err = ExperimentConfig::resolve(&[("epochs", "many")], None).unwrap_err();
        assert!(err.to_string().contains("epochs"), "{err}");
        let err = ExperimentConfig::resolve(&[("trials", "0")], None).unwrap_err();
        assert!(err.to_string().contains("trials"), "{err}");
        let err = ExperimentConfig::resolve(&[("sigma", "-1")], None).unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
        let err = ExperimentConfig::resolve(&[("centers", "-1,1")], None).unwrap_err();
        assert!(err.to_string().contains("neurons"), "{err}");
        let err = ExperimentConfig::resolve(&[("bogus", "1")], None).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = ExperimentConfig::resolve(&[("nu", "1.5")], None).unwrap_err();
        assert!(err.to_string().contains("nu"), "{err}");
    }

    #[test]
    fn centers_forms() {
        let c = ExperimentConfig::resolve(&[("centers", "-1,1"), ("neurons", "2")], None).unwrap();
        assert_eq!(c.centers, CenterRule::Explicit(vec![-1.0, 1.0]));
        let c = ExperimentConfig::resolve(&[("centers", "0:1:0.5"), ("neurons", "3")], None).unwrap();
        assert_eq!(c.center_grid().unwrap().neurons(), 3);
        assert!(ExperimentConfig::resolve(&[("centers", "0:1")], None).is_err());
    }

    #[test]
    fn kv_text_round_trips() {
        let mut c = ExperimentConfig::benchmark_defaults(ModelKind::Frbf);
        c.eta = 0.012_345_678_901_234_5;
        c.plant.q4 = 0.0;
        c.test_target = TestTarget::Noisy;
        c.kernel = KernelKind::InverseMultiquadric;
        c.zeta = 0.3;
        let text = c.to_kv_string();
        let a = parse_assignments(&text, Path::new("mem")).unwrap();
        assert_eq!(a.len(), KEYS.len());
        assert_eq!(ExperimentConfig::resolve(&a, None).unwrap(), c);
    }

    #[test]
    fn file_parser_rejects_unknown_and_malformed() {
        let p = Path::new("exp.conf");
        let ok = parse_assignments("# comment

epochs = 3 # trailing
", p).unwrap();
        assert_eq!(ok, vec![("epochs".to_string(), "3".to_string())]);
        let e = parse_assignments("epochs = 3
foo = 1
", p).unwrap_err();
        assert!(e.to_string().contains("exp.conf:2"), "{e}");
        assert!(e.to_string().contains("foo"));
        assert!(parse_assignments("epochs 3
", p).is_err());
        let missing = load_assignments(Path::new("/nonexistent/exp.conf")).unwrap_err();
        assert!(missing.to_string().contains("/nonexistent/exp.conf"));
    }

    #[test]
    fn every_key_is_settable_and_gettable() {
        let base = ExperimentConfig::default();
        for key in KEYS {
            let v = base.get(key).unwrap();
            let mut c = base.clone();
            c.set(key, &v).unwrap();
            assert_eq!(c, base, "key {key}");
        }
    }
}
