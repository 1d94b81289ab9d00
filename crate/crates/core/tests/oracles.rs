//! Independent reference values for the pieces the rest of the crate builds on.

use approx::assert_relative_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strbf_core::plant::run_plant_clean;
use strbf_core::{
    activations, gaussian_noise, gen_square, plant_output, CenterGrid, FrbfConfig, Kernel,
    PlantCoeffs, SignalSpec,
};

/// Stirling series for ln Γ, shifted up by recurrence so the tail is negligible.
fn gamma_oracle(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < 20.0 {
        prod *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0;
    let ln_gamma = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series;
    ln_gamma.exp() / prod
}

#[test]
fn gamma_factor_matches_stirling_oracle() {
    for nu in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let cfg = FrbfConfig::new(1.0, 1.0, 0.5, nu).unwrap();
        assert_relative_eq!(cfg.gamma_factor, gamma_oracle(2.0 - nu), max_relative = 1e-12);
    }
    assert_relative_eq!(gamma_oracle(1.5), std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-13);
    let cfg = FrbfConfig::new(1.0, 1.0, 0.5, 0.9).unwrap();
    assert_relative_eq!(cfg.gamma_factor, 0.951_350_769_866_873_2, max_relative = 1e-14);
}

#[test]
fn fractional_gain_at_unit_weight_is_reciprocal_gamma() {
    let cfg = FrbfConfig::new(1.0, 1.0, 0.5, 0.5).unwrap();
    assert_relative_eq!(cfg.fractional_gain(1.0), 2.0 / std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    assert_eq!(cfg.fractional_gain(0.0), 0.0);
}

#[test]
fn kernel_reference_values() {
    let g = Kernel::Gaussian { sigma: 1.0 };
    assert_relative_eq!(g.eval(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
    assert_relative_eq!(Kernel::Gaussian { sigma: 2.0 }.eval(4.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
    assert_eq!(Kernel::Multiquadric.eval(9.0).unwrap(), 3.0);
    let imq = Kernel::InverseMultiquadric { zeta: 1.0 };
    assert_relative_eq!(imq.eval(3.0).unwrap(), 0.5, max_relative = 1e-15);
}

#[test]
fn activation_vector_on_default_grid() {
    let grid = CenterGrid::replicated(&[-5.0, -3.0, -1.0, 1.0, 3.0, 5.0], 1).unwrap();
    let phi = activations(&grid, &Kernel::Gaussian { sigma: 1.0 }, &[0.0]).unwrap();
    let expect = [(-25.0f64).exp(), (-9.0f64).exp(), (-1.0f64).exp()];
    for i in 0..3 {
        assert_relative_eq!(phi[i], expect[i], max_relative = 1e-15);
        assert_relative_eq!(phi[5 - i], expect[i], max_relative = 1e-15);
    }
}

#[test]
fn plant_reference_points() {
    let q = PlantCoeffs::default();
    let y = plant_output(&q, 1.0, 0.0, 0.0, 0.0);
    let expect = 2.0 - 0.7 * (3.0f64.cos() + (-1.0f64).exp());
    assert_relative_eq!(y, expect, max_relative = 1e-15);
    assert_relative_eq!(plant_output(&q, 0.0, 0.0, 0.0, 0.0), -1.4, max_relative = 1e-15);
    assert_eq!(plant_output(&q, 0.0, 0.0, 0.0, 0.25), -1.4 + 0.25);
}

#[test]
fn plant_history_starts_at_zero() {
    let q = PlantCoeffs::default();
    let y = run_plant_clean(&q, &[1.0, 1.0, 1.0]).unwrap();
    let base = -0.7 * (3.0f64.cos() + (-1.0f64).exp());
    assert_relative_eq!(y[0], 2.0 + base, max_relative = 1e-15);
    assert_relative_eq!(y[1], 2.0 - 0.5 + base, max_relative = 1e-15);
    assert_relative_eq!(y[2], 2.0 - 0.5 - 0.1 + base, max_relative = 1e-15);
}

#[test]
fn training_signal_is_exact() {
    let r = gen_square(&SignalSpec::training()).unwrap();
    assert_eq!(r.len(), 1000);
    for (j, &v) in r.iter().enumerate() {
        let expect = if (j / 250) % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(v.to_bits(), f64::to_bits(expect), "sample {j}");
    }
}

#[test]
fn testing_signal_is_exact() {
    let r = gen_square(&SignalSpec::testing()).unwrap();
    assert_eq!(r.len(), 200);
    assert!(r[..100].iter().all(|&v| v == 1.0));
    assert!(r[100..].iter().all(|&v| v == -1.0));
}

#[test]
fn noise_moments_over_a_million_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n).map(|_| gaussian_noise(&mut rng, 0.1).unwrap()).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() <= 2e-3, "mean {mean}");
    assert!((var - 0.1).abs() <= 0.05 * 0.1, "variance {var}");
}

#[test]
fn zero_variance_noise_is_exactly_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    assert!((0..1000).all(|_| gaussian_noise(&mut rng, 0.0).unwrap() == 0.0));
    assert!(gaussian_noise(&mut rng, -0.1).is_err());
}
