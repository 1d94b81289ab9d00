use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use strbf_core::ModelKind;

#[derive(Debug, Parser)]
#[command(
    name = "strbf",
    version,
    about = "Online RBF / fractional RBF / spatio-temporal RBF system-identification benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo run of one model; writes curve CSVs and prints a summary.
    Run(RunArgs),
    /// Runs rbf, frbf and strbf on the same seeds and prints a comparison table.
    Compare(ExperimentArgs),
    /// Finite-difference check of every update rule on random small networks.
    Gradcheck(GradcheckArgs),
    /// Dumps the training/testing input signals and clean plant outputs.
    Signals(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Model to train.
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelKind>,
    #[command(flatten)]
    pub exp: ExperimentArgs,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: strbf_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Flat `key = value` config file, applied over the built-in defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for CSV output (created if missing).
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Every config key as a flag. Applied after the config file.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Base seed; trial k uses ChaCha8 stream 3k+purpose under this key.
    #[arg(long)]
    pub seed: Option<String>,
    /// Number of hidden neurons S (must match the center rule).
    #[arg(long)]
    pub neurons: Option<String>,
    /// Tapped-delay input length D.
    #[arg(long)]
    pub input_dim: Option<String>,
    /// Truncated time T of the spatio-temporal network (forced to 1 for rbf/frbf).
    #[arg(long)]
    pub lags: Option<String>,
    /// gaussian | multiquadric | inverse_multiquadric.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Gaussian spread.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Inverse-multiquadric offset.
    #[arg(long)]
    pub zeta: Option<String>,
    /// Centers as lo:hi:step or a comma list, replicated across input dimensions.
    #[arg(long, allow_hyphen_values = true)]
    pub centers: Option<String>,
    /// Step size.
    #[arg(long)]
    pub eta: Option<String>,
    /// Fractional step size (frbf).
    #[arg(long)]
    pub eta_v: Option<String>,
    /// Conventional/fractional mixing weight in [0, 1] (frbf).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Fractional order in (0, 1) (frbf).
    #[arg(long)]
    pub nu: Option<String>,
    /// Online passes over the training signal.
    #[arg(long)]
    pub epochs: Option<String>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<String>,
    /// Standard deviation of the Gaussian parameter initialization.
    #[arg(long)]
    pub init_scale: Option<String>,
    /// Plant coefficient q1.
    #[arg(long, allow_hyphen_values = true)]
    pub q1: Option<String>,
    /// Plant coefficient q2.
    #[arg(long, allow_hyphen_values = true)]
    pub q2: Option<String>,
    /// Plant coefficient q3.
    #[arg(long, allow_hyphen_values = true)]
    pub q3: Option<String>,
    /// Plant coefficient q4.
    #[arg(long, allow_hyphen_values = true)]
    pub q4: Option<String>,
    /// Plant coefficient q5.
    #[arg(long, allow_hyphen_values = true)]
    pub q5: Option<String>,
    /// Measurement noise variance.
    #[arg(long)]
    pub noise_variance: Option<String>,
    /// Training signal length.
    #[arg(long)]
    pub train_length: Option<String>,
    /// Training square-wave half period.
    #[arg(long)]
    pub train_half_period: Option<String>,
    /// Training square-wave amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub train_amplitude: Option<String>,
    /// Testing signal length.
    #[arg(long)]
    pub test_length: Option<String>,
    /// Testing square-wave half period.
    #[arg(long)]
    pub test_half_period: Option<String>,
    /// Testing square-wave amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub test_amplitude: Option<String>,
    /// clean | noisy: plant output used as the test target.
    #[arg(long)]
    pub test_target: Option<String>,
    /// Trailing moving-average window for an extra smoothed dB column (0 = off).
    #[arg(long)]
    pub ma_window: Option<String>,
}

impl Overrides {
    /// `(key, value)` pairs in config-key order.
    pub fn assignments(&self) -> Vec<(String, String)> {
        let fields: [(&str, &Option<String>); 29] = [
            ("seed", &self.seed),
            ("neurons", &self.neurons),
            ("input_dim", &self.input_dim),
            ("lags", &self.lags),
            ("kernel", &self.kernel),
            ("sigma", &self.sigma),
            ("zeta", &self.zeta),
            ("centers", &self.centers),
            ("eta", &self.eta),
            ("eta_v", &self.eta_v),
            ("alpha", &self.alpha),
            ("nu", &self.nu),
            ("epochs", &self.epochs),
            ("trials", &self.trials),
            ("init_scale", &self.init_scale),
            ("q1", &self.q1),
            ("q2", &self.q2),
            ("q3", &self.q3),
            ("q4", &self.q4),
            ("q5", &self.q5),
            ("noise_variance", &self.noise_variance),
            ("train_length", &self.train_length),
            ("train_half_period", &self.train_half_period),
            ("train_amplitude", &self.train_amplitude),
            ("test_length", &self.test_length),
            ("test_half_period", &self.test_half_period),
            ("test_amplitude", &self.test_amplitude),
            ("test_target", &self.test_target),
            ("ma_window", &self.ma_window),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Random configurations per model.
    #[arg(long, default_value_t = 100)]
    pub configs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
