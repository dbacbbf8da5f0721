//! Full time-periodic model in the rotating frame of the effective model,
//! where the cavity sits at `delta_a = omega_a - omega_G`.
//!
//! The coupling `c(t) = (G0 + Gmod cos(omega_G t)) e^{i omega_G t}` enters as
//! `da/dt = -i delta_a a + c (P + P†)` and `dP/dt = -i W P + c a† - c̄ a`.
//! Its harmonics are `Gmod/2` at zero frequency, `G0` at `omega_G` and
//! `Gmod/2` at `2 omega_G`, so the time average is the effective model with
//! the `half` convention.

use std::f64::consts::TAU;

use nalgebra::Matrix4;
use serde::Serialize;

use super::covariance::{integrate_covariance, lyapunov_steady_state, CovarianceState};
use crate::linalg::{c, to_quadrature_basis, CMatrix4, C64, I};
use crate::model::{damping, vacuum_diffusion};
use crate::params::SystemParams;
use crate::{Error, Result};

/// Coarsest allowed sampling of one modulation period.
pub const STEPS_PER_PERIOD_MIN: usize = 50;

/// Entries of this size mean the propagation has left any physical regime.
const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicDrift {
    params: SystemParams,
}

impl PeriodicDrift {
    pub fn new(params: SystemParams) -> Self {
        Self { params }
    }

    pub fn period(&self) -> f64 {
        TAU / self.params.omega_g
    }

    pub fn coupling(&self, t: f64) -> C64 {
        let p = &self.params;
        let wt = p.omega_g * t;
        C64::from_polar(p.g0 + p.gmod * wt.cos(), wt)
    }

    /// `(frequency, amplitude)` pairs with `c(t) = Σ amplitude e^{i frequency t}`.
    pub fn harmonics(&self) -> [(f64, f64); 3] {
        let p = &self.params;
        [(0.0, 0.5 * p.gmod), (p.omega_g, p.g0), (2.0 * p.omega_g, 0.5 * p.gmod)]
    }

    /// Lossless mode-basis generator for a given coupling value.
    fn generator(&self, k: C64) -> CMatrix4 {
        let p = &self.params;
        let d = I * p.delta_a();
        let w = I * p.w;
        let kc = k.conj();
        let z = c(0.0);
        #[rustfmt::skip]
        let a = CMatrix4::new(
            -d,  z,  k,  k,
            z,   d,  kc, kc,
            -kc, k, -w,  z,
            kc, -k,  z,  w,
        );
        a
    }

    fn quadrature_drift(&self, k: C64) -> Matrix4<f64> {
        let (f, _) = to_quadrature_basis(&self.generator(k));
        f - damping(&self.params)
    }

    /// Quadrature drift matrix at time `t`.
    pub fn at(&self, t: f64) -> Matrix4<f64> {
        self.quadrature_drift(self.coupling(t))
    }

    /// Drift of the zero-frequency harmonic alone.
    pub fn mean_drift(&self) -> Matrix4<f64> {
        self.quadrature_drift(c(self.harmonics()[0].1))
    }
}

/// Covariance samples at uniform times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Matrix4<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Matrix4<f64>> {
        self.states.last()
    }
}

fn check_step(period: f64, dt: f64) -> Result<()> {
    let limit = period / STEPS_PER_PERIOD_MIN as f64;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!("time step {dt} must be positive")));
    }
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    Ok(())
}

/// Propagates the full periodic model from vacuum over `[0, t_final]`.
pub fn periodic_propagation(p: &SystemParams, t_final: f64, dt: f64) -> Result<Trajectory> {
    p.validate().into_result()?;
    let drift = PeriodicDrift::new(*p);
    check_step(drift.period(), dt)?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "final time {t_final} must be non-negative"
        )));
    }
    let steps = (t_final / dt).round() as usize;
    let d = vacuum_diffusion(p);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    integrate_covariance(
        |t| drift.at(t),
        &d,
        CovarianceState::vacuum().sigma,
        0.0,
        dt,
        steps,
        |_, t, s| {
            times.push(t);
            states.push(*s);
        },
    );
    Ok(Trajectory { times, states })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaOptions {
    /// Total propagation time; `None` means the transient `10/min(gamma)`
    /// plus the averaging window.
    pub t_final: Option<f64>,
    pub threshold: f64,
    pub steps_per_period: usize,
    /// Number of trailing periods averaged.
    pub average_periods: usize,
}

impl Default for RwaOptions {
    fn default() -> Self {
        Self {
            t_final: None,
            threshold: 0.02,
            steps_per_period: STEPS_PER_PERIOD_MIN,
            average_periods: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RwaReport {
    /// `max |avg - sigma_eff| / max(|sigma_eff|, 1/2)` over entries;
    /// infinite if the propagation diverged.
    pub deviation: f64,
    pub threshold: f64,
    pub pass: bool,
    pub diverged: bool,
    /// The averaging window starts after the transient `10/min(gamma)`.
    pub settled: bool,
    pub t_final: f64,
    pub periods: usize,
    pub averaged: Option<CovarianceState>,
    pub effective: CovarianceState,
}

pub fn rwa_validate(p: &SystemParams) -> Result<RwaReport> {
    rwa_validate_with(p, RwaOptions::default())
}

/// Compares the period-averaged covariance of the full model with the
/// stationary covariance of the effective model.
pub fn rwa_validate_with(p: &SystemParams, opts: RwaOptions) -> Result<RwaReport> {
    let effective = lyapunov_steady_state(p)?;
    let drift = PeriodicDrift::new(*p);
    let period = drift.period();
    let spp = opts.steps_per_period.max(1);
    let dt = period / spp as f64;
    check_step(period, dt)?;
    let avg_periods = opts.average_periods.max(1);
    let transient = 10.0 / p.gamma_a.min(p.gamma_p);
    let t_target = opts.t_final.unwrap_or(transient + avg_periods as f64 * period);
    if !(t_target > 0.0 && t_target.is_finite()) {
        return Err(Error::InvalidParams(format!("final time {t_target} must be positive")));
    }
    let periods = ((t_target / period).ceil() as usize).max(avg_periods);
    let steps = periods * spp;
    let window_start = (periods - avg_periods) * spp;
    let settled = (periods - avg_periods) as f64 * period >= transient;

    let d = vacuum_diffusion(p);
    let mut sum = Matrix4::zeros();
    let mut diverged = false;
    integrate_covariance(
        |t| drift.at(t),
        &d,
        CovarianceState::vacuum().sigma,
        0.0,
        dt,
        steps,
        |k, _, s| {
            if !s.iter().all(|v| v.is_finite() && v.abs() < DIVERGENCE_BOUND) {
                diverged = true;
            }
            if k >= window_start && k < steps {
                sum += s;
            }
        },
    );

    let t_final = steps as f64 * dt;
    if diverged {
        return Ok(RwaReport {
            deviation: f64::INFINITY,
            threshold: opts.threshold,
            pass: false,
            diverged,
            settled,
            t_final,
            periods,
            averaged: None,
            effective,
        });
    }
    let averaged = sum / (steps - window_start) as f64;
    let deviation = averaged
        .iter()
        .zip(effective.sigma.iter())
        .map(|(a, e)| (a - e).abs() / e.abs().max(0.5))
        .fold(0.0, f64::max);
    Ok(RwaReport {
        deviation,
        threshold: opts.threshold,
        pass: deviation <= opts.threshold,
        diverged,
        settled,
        t_final,
        periods,
        averaged: Some(CovarianceState { sigma: averaged }),
        effective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::drift_diffusion;
    use crate::params::CouplingConvention;

    const W: f64 = 0.1;

    #[test]
    fn time_average_is_effective_drift() {
        let p = SystemParams::reference(0.4 * W).with_g0(0.3 * W);
        let drift = PeriodicDrift::new(p);
        let n = 400;
        let dt = drift.period() / n as f64;
        let avg = (0..n).map(|k| drift.at(k as f64 * dt)).sum::<Matrix4<f64>>() / n as f64;
        let eff = drift_diffusion(&p.with_convention(CouplingConvention::Half)).f;
        assert!((avg - eff).amax() < 1e-12);
        assert!((drift.mean_drift() - eff).amax() < 1e-12);
    }

    #[test]
    fn constant_coupling_reduces_to_effective_drift() {
        let p = SystemParams::reference(0.0).with_gmod(0.0).with_g0(0.0);
        let drift = PeriodicDrift::new(p);
        let eff = drift_diffusion(&p).f;
        assert!((drift.at(1.234) - eff).amax() < 1e-14);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let p = SystemParams::reference(0.1 * W);
        let period = PeriodicDrift::new(p).period();
        assert!(matches!(
            periodic_propagation(&p, 10.0, period / 40.0),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(periodic_propagation(&p, 10.0, period / 50.0).is_ok());
    }

    #[test]
    fn decoupled_relaxation_stays_at_vacuum() {
        let p = SystemParams::reference(0.0);
        let period = PeriodicDrift::new(p).period();
        let traj = periodic_propagation(&p, 200.0, period / 50.0).unwrap();
        for s in &traj.states {
            assert!((s - Matrix4::identity() * 0.5).amax() < 1e-14);
        }
    }

    #[test]
    fn step_halving_converges() {
        let p = SystemParams::reference(0.4 * W);
        let period = PeriodicDrift::new(p).period();
        let t = 20.0 * period;
        let a = periodic_propagation(&p, t, period / 50.0).unwrap();
        let b = periodic_propagation(&p, t, period / 100.0).unwrap();
        let err = (a.last().unwrap() - b.last().unwrap()).amax();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn weak_modulation_passes() {
        let r = rwa_validate(&SystemParams::reference(0.1 * W)).unwrap();
        assert!(r.settled && !r.diverged);
        assert!(r.pass, "{}", r.deviation);
    }
}
