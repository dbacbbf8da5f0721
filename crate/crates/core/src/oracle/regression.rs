//! Output spectrum from stationary two-time correlations.
//!
//! For vacuum inputs and `X_out = X_in + sqrt(gamma_a) X`, the symmetrised
//! output correlation is `δ(τ)/2 + γ_a c(θ)ᵀ e^{f|τ|} (σ - I/2) c(θ)`, where
//! the `-I/2` collects the input/system cross terms. The vacuum-normalised
//! spectrum is therefore
//! `S = 1 + 4 γ_a Re ∫_0^∞ c(θ)ᵀ e^{fτ} (σ - I/2) c(θ) e^{iωτ} dτ`,
//! evaluated here by composite Simpson quadrature on a dense `τ` grid.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;

use super::covariance::lyapunov_steady_state;
use crate::linalg::C64;
use crate::model::{drift_diffusion, require_stable};
use crate::params::SystemParams;
use crate::spectrum::NoiseSpectrum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionOptions {
    /// The correlation window covers this many e-foldings of the slowest mode.
    pub decay_lengths: f64,
    /// Upper bound on the `τ` step.
    pub max_step: f64,
    /// Minimum samples per period of the fastest oscillation in the integrand.
    pub points_per_period: f64,
}

impl Default for RegressionOptions {
    fn default() -> Self {
        Self {
            decay_lengths: 10.0,
            max_step: 0.5,
            points_per_period: 32.0,
        }
    }
}

pub fn output_spectrum_regression(p: &SystemParams, omega_grid: &[f64], theta_grid: &[f64]) -> Result<NoiseSpectrum> {
    output_spectrum_regression_with(p, omega_grid, theta_grid, RegressionOptions::default())
}

pub fn output_spectrum_regression_with(
    p: &SystemParams,
    omega_grid: &[f64],
    theta_grid: &[f64],
    opts: RegressionOptions,
) -> Result<NoiseSpectrum> {
    if omega_grid.is_empty() {
        return Err(Error::EmptyGrid("omega"));
    }
    if theta_grid.is_empty() {
        return Err(Error::EmptyGrid("theta"));
    }
    let stability = require_stable(p)?;
    let f = drift_diffusion(p).f;
    let sigma = lyapunov_steady_state(p)?.sigma;
    let excess = sigma - Matrix4::identity() * 0.5;

    // Window: at least 20/min(gamma), longer when the slowest mode decays slower.
    let tau_max = (20.0 / p.gamma_a.min(p.gamma_p)).max(opts.decay_lengths / stability.margin);
    let internal = f.complex_eigenvalues().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let external = omega_grid.iter().map(|w| w.abs()).fold(0.0, f64::max);
    let fastest = internal + external;
    let mut h = opts.max_step;
    if fastest > 0.0 {
        h = h.min(TAU / (opts.points_per_period * fastest));
    }
    let mut n = (tau_max / h).ceil() as usize;
    n += n % 2;
    let h = tau_max / n as f64;

    // Correlations c(θ)ᵀ e^{f τ_k} (σ - I/2) c(θ) for every θ.
    let step = (f * h).exp();
    let dirs: Vec<Vector4<f64>> = theta_grid
        .iter()
        .map(|&th| Vector4::new(th.cos(), th.sin(), 0.0, 0.0))
        .collect();
    let mut corr: Vec<Vec<f64>> = vec![Vec::with_capacity(n + 1); theta_grid.len()];
    let mut y = excess;
    for _ in 0..=n {
        for (series, c) in corr.iter_mut().zip(&dirs) {
            series.push(c.dot(&(y * c)));
        }
        y = step * y;
    }

    let weights: Vec<f64> = (0..=n)
        .map(|k| {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();

    let s_linear: Vec<Vec<f64>> = omega_grid
        .par_iter()
        .map(|&omega| {
            let rot = C64::from_polar(1.0, omega * h);
            corr.iter()
                .map(|series| {
                    let mut phase = C64::new(1.0, 0.0);
                    let mut acc = C64::new(0.0, 0.0);
                    for (g, w) in series.iter().zip(&weights) {
                        acc += phase * (g * w);
                        phase *= rot;
                    }
                    1.0 + 4.0 * p.gamma_a * acc.re
                })
                .collect()
        })
        .collect();

    Ok(NoiseSpectrum::from_linear(
        omega_grid.to_vec(),
        theta_grid.to_vec(),
        s_linear,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::quadrature_spectrum;
    use crate::spectrum::{default_theta_grid, uniform_grid};

    const W: f64 = 0.1;

    #[test]
    fn decoupled_is_vacuum() {
        let grid = uniform_grid(-0.3, 0.3, 61);
        let s = output_spectrum_regression(&SystemParams::reference(0.0), &grid, &default_theta_grid()).unwrap();
        for v in s.s_linear.iter().flatten() {
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn agrees_with_frequency_domain_on_coarse_grid() {
        let grid = uniform_grid(-0.3, 0.3, 121);
        let thetas = [0.0, 0.4, std::f64::consts::PI / 6.0, 2.0];
        for p in [
            SystemParams::reference(0.4 * W),
            SystemParams::reference(0.5 * W).with_delta_a(0.0),
        ] {
            let a = output_spectrum_regression(&p, &grid, &thetas).unwrap();
            let b = quadrature_spectrum(&p, &grid, &thetas).unwrap();
            let worst = a
                .s_db
                .iter()
                .flatten()
                .zip(b.s_db.iter().flatten())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(worst < 0.01, "{worst} dB");
        }
    }

    #[test]
    fn refuses_unstable() {
        let p = SystemParams::reference(0.5 * W).with_delta_a(-W);
        assert!(matches!(
            output_spectrum_regression(&p, &[0.0], &[0.0]),
            Err(Error::Unstable { .. })
        ));
    }
}
