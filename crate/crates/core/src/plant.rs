//! Benchmark plant, measurement noise and square-wave excitation.
//!
//! ```text
//! y(k) = q1 r(k) + q2 r(k−1) + q3 r(k−2) + q4 [cos(q5 r(k)) + exp(−|r(k)|)] + n(k)
//! ```
//!
//! Input samples before the start of a signal are taken as zero.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantCoeffs {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
}

impl Default for PlantCoeffs {
    fn default() -> Self {
        PlantCoeffs {
            q1: 2.0,
            q2: -0.5,
            q3: -0.1,
            q4: -0.7,
            q5: 3.0,
        }
    }
}

impl PlantCoeffs {
    pub fn validate(&self) -> Result<()> {
        let all = [self.q1, self.q2, self.q3, self.q4, self.q5];
        if all.iter().all(|q| q.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("plant coefficients must be finite"))
        }
    }
}

/// Additive white Gaussian measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec { variance: 0.1 }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        check_variance(self.variance)
    }
}

/// Square wave starting at `+amplitude`, flipping sign every `half_period`
/// samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    pub length: usize,
    pub half_period: usize,
    pub amplitude: f64,
}

impl SignalSpec {
    /// 1000 samples, ±1 in blocks of 250.
    pub fn training() -> Self {
        SignalSpec {
            length: 1000,
            half_period: 250,
            amplitude: 1.0,
        }
    }

    /// 200 samples, ±1 in blocks of 100: 2.5× the training frequency.
    pub fn testing() -> Self {
        SignalSpec {
            length: 200,
            half_period: 100,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 || self.half_period == 0 {
            return Err(Error::invalid(format!(
                "signal length and half period must be >= 1, got {} and {}",
                self.length, self.half_period
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("signal amplitude must be finite"));
        }
        Ok(())
    }
}

fn check_variance(variance: f64) -> Result<()> {
    if variance >= 0.0 && variance.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "noise variance must be finite and >= 0, got {variance}"
        )))
    }
}

pub fn plant_output(coeffs: &PlantCoeffs, r_k: f64, r_km1: f64, r_km2: f64, noise: f64) -> f64 {
    clean_output(coeffs, r_k, r_km1, r_km2) + noise
}

#[inline]
fn clean_output(q: &PlantCoeffs, r_k: f64, r_km1: f64, r_km2: f64) -> f64 {
    q.q1 * r_k + q.q2 * r_km1 + q.q3 * r_km2 + q.q4 * ((q.q5 * r_k).cos() + (-r_k.abs()).exp())
}

pub fn gen_square(spec: &SignalSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok((0..spec.length)
        .map(|j| {
            if (j / spec.half_period).is_multiple_of(2) {
                spec.amplitude
            } else {
                -spec.amplitude
            }
        })
        .collect())
}

/// One draw from `N(0, variance)`. Always consumes one standard-normal
/// sample so streams stay aligned across variances.
pub fn gaussian_noise<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Result<f64> {
    check_variance(variance)?;
    let z: f64 = rng.sample(StandardNormal);
    Ok(if variance == 0.0 { 0.0 } else { variance.sqrt() * z })
}

/// Drives the plant with `input`, one noise draw per sample.
pub fn run_plant<R: Rng + ?Sized>(
    coeffs: &PlantCoeffs,
    input: &[f64],
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let clean = run_plant_clean(coeffs, input)?;
    add_noise(clean, noise, rng)
}

/// Noise-free plant response.
pub fn run_plant_clean(coeffs: &PlantCoeffs, input: &[f64]) -> Result<Vec<f64>> {
    if input.is_empty() {
        return Err(Error::invalid("plant input must be non-empty"));
    }
    let at = |j: usize, lag: usize| if j >= lag { input[j - lag] } else { 0.0 };
    Ok((0..input.len())
        .map(|k| clean_output(coeffs, at(k, 0), at(k, 1), at(k, 2)))
        .collect())
}

pub(crate) fn add_noise<R: Rng + ?Sized>(
    mut clean: Vec<f64>,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_variance(noise.variance)?;
    for y in &mut clean {
        *y += gaussian_noise(rng, noise.variance)?;
    }
    Ok(clean)
}

/// Writes `values` as a single-column CSV with header `name`.
pub fn write_column_csv(path: &Path, name: &str, values: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut body = String::with_capacity(values.len() * 24 + name.len() + 1);
    body.push_str(name);
    body.push('\n');
    for v in values {
        body.push_str(&crate::harness::csv::fmt_f64(*v));
        body.push('\n');
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plant_examples() {
        let q = PlantCoeffs::default();
        assert_abs_diff_eq!(plant_output(&q, 0.0, 0.0, 0.0, 0.0), -1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(plant_output(&q, 1.0, 1.0, 1.0, 0.0), 1.8354791, epsilon = 1e-7);
        let n = 0.123_456_789;
        assert_eq!(
            plant_output(&q, 0.3, -1.0, 2.0, n),
            plant_output(&q, 0.3, -1.0, 2.0, 0.0) + n
        );
    }

    #[test]
    fn square_wave_examples() {
        let s = gen_square(&SignalSpec::training()).unwrap();
        assert_eq!(s.len(), 1000);
        for (j, v) in s.iter().enumerate() {
            let expected = match j {
                0..=249 | 500..=749 => 1.0,
                _ => -1.0,
            };
            assert_eq!(*v, expected, "sample {j}");
        }
        let t = gen_square(&SignalSpec::testing()).unwrap();
        assert_eq!(t.len(), 200);
        assert!(t[..100].iter().all(|&v| v == 1.0));
        assert!(t[100..].iter().all(|&v| v == -1.0));

        let z = gen_square(&SignalSpec { length: 1, half_period: 1, amplitude: 0.0 }).unwrap();
        assert_eq!(z, vec![0.0]);
        assert!(gen_square(&SignalSpec { length: 0, half_period: 1, amplitude: 1.0 }).is_err());
        assert!(gen_square(&SignalSpec { length: 4, half_period: 0, amplitude: 1.0 }).is_err());
    }

    #[test]
    fn noise_degenerate_and_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(gaussian_noise(&mut rng, 0.0).unwrap(), 0.0);
        }
        assert!(gaussian_noise(&mut rng, -0.1).is_err());
    }

    #[test]
    fn run_plant_examples() {
        let q = PlantCoeffs::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let quiet = NoiseSpec { variance: 0.0 };
        let y = run_plant(&q, &[0.0; 16], &quiet, &mut rng).unwrap();
        assert!(y.iter().all(|&v| (v + 1.4).abs() < 1e-15));

        let y = run_plant(&q, &[1.0], &quiet, &mut rng).unwrap();
        assert_abs_diff_eq!(y[0], 2.4354791, epsilon = 1e-7);
        assert!(run_plant(&q, &[], &quiet, &mut rng).is_err());
    }

    #[test]
    fn noise_stream_is_recovered_from_outputs() {
        let q = PlantCoeffs::default();
        let input = gen_square(&SignalSpec::training()).unwrap();
        let clean = run_plant(&q, &input, &NoiseSpec { variance: 0.0 }, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let noisy = run_plant(&q, &input, &NoiseSpec::default(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (k, (c, n)) in clean.iter().zip(&noisy).enumerate() {
            let draw = gaussian_noise(&mut rng, 0.1).unwrap();
            assert_eq!(*n, c + draw, "sample {k}");
        }
    }

    #[test]
    fn plant_ignores_history_beyond_two_lags() {
        let q = PlantCoeffs::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..50).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut b = a.clone();
        for v in &mut b[..30] {
            *v = rng.random_range(-2.0..2.0);
        }
        let ya = run_plant_clean(&q, &a).unwrap();
        let yb = run_plant_clean(&q, &b).unwrap();
        assert_eq!(ya[32..], yb[32..]);
    }

    #[test]
    fn column_csv_writes_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_column_csv(&p, "input", &[1.0, -1.0]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "input");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].parse::<f64>().unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn square_wave_flips_at_half_periods(len in 1usize..500, hp in 1usize..60, amp in -3.0f64..3.0) {
            let s = gen_square(&SignalSpec { length: len, half_period: hp, amplitude: amp }).unwrap();
            prop_assert_eq!(s.len(), len);
            for j in 0..len {
                prop_assert!(s[j] == amp || s[j] == -amp);
                if j > 0 && amp != 0.0 {
                    prop_assert_eq!(s[j] != s[j - 1], j % hp == 0);
                }
            }
        }

        #[test]
        fn clean_run_matches_samplewise(xs in proptest::collection::vec(-3.0f64..3.0, 1..50)) {
            let q = PlantCoeffs::default();
            let y = run_plant(&q, &xs, &NoiseSpec { variance: 0.0 }, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            for k in 0..xs.len() {
                let r1 = if k >= 1 { xs[k - 1] } else { 0.0 };
                let r2 = if k >= 2 { xs[k - 2] } else { 0.0 };
                prop_assert_eq!(y[k], plant_output(&q, xs[k], r1, r2, 0.0));
            }
        }
    }
}
