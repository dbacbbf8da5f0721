use nalgebra::Matrix4;
use serde::Serialize;

use crate::linalg::{lyapunov_residual, solve_lyapunov, symplectic_eigenvalues, uncertainty_min_eigenvalue};
use crate::model::{drift_diffusion, require_stable};
use crate::params::SystemParams;
use crate::{Error, Result};

/// Covariance of `(x_a, p_a, x_P, p_P)`; vacuum is `I/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceState {
    pub sigma: Matrix4<f64>,
}

impl CovarianceState {
    pub fn vacuum() -> Self {
        Self {
            sigma: Matrix4::identity() * 0.5,
        }
    }

    /// `sigma + (i/2) Omega >= 0` up to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let asym = (self.sigma - self.sigma.transpose()).norm();
        asym <= tol && uncertainty_min_eigenvalue(&self.sigma) >= -tol
    }

    pub fn symplectic_eigenvalues(&self) -> [f64; 2] {
        symplectic_eigenvalues(&self.sigma)
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.sigma[(i, j)]))
    }
}

impl Serialize for CovarianceState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Stationary covariance of the effective model, `f σ + σ fᵀ + d = 0`.
pub fn lyapunov_steady_state(p: &SystemParams) -> Result<CovarianceState> {
    require_stable(p)?;
    let dd = drift_diffusion(p);
    let sigma = solve_lyapunov(&dd.f, &dd.d).ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    let residual = lyapunov_residual(&dd.f, &sigma, &dd.d);
    if !(residual <= 1e-10) {
        return Err(Error::Numerical(format!("Lyapunov residual {residual:.3e}")));
    }
    Ok(CovarianceState { sigma })
}

/// Classical fourth-order Runge-Kutta for `dσ/dt = f(t) σ + σ f(t)ᵀ + d`.
///
/// `observe` sees the state at the start of every step and once more at
/// the end, with the step index and time.
pub fn integrate_covariance(
    drift: impl Fn(f64) -> Matrix4<f64>,
    d: &Matrix4<f64>,
    sigma0: Matrix4<f64>,
    t0: f64,
    dt: f64,
    steps: usize,
    mut observe: impl FnMut(usize, f64, &Matrix4<f64>),
) -> Matrix4<f64> {
    let rhs = |t: f64, s: &Matrix4<f64>| {
        let f = drift(t);
        f * s + s * f.transpose() + d
    };
    let mut s = sigma0;
    for k in 0..steps {
        let t = t0 + dt * k as f64;
        observe(k, t, &s);
        let k1 = rhs(t, &s);
        let k2 = rhs(t + 0.5 * dt, &(s + k1 * (0.5 * dt)));
        let k3 = rhs(t + 0.5 * dt, &(s + k2 * (0.5 * dt)));
        let k4 = rhs(t + dt, &(s + k3 * dt));
        s += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        s = (s + s.transpose()) * 0.5;
    }
    observe(steps, t0 + dt * steps as f64, &s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: f64 = 0.1;

    #[test]
    fn decoupled_steady_state_is_vacuum() {
        let s = lyapunov_steady_state(&SystemParams::reference(0.0)).unwrap();
        assert!((s.sigma - Matrix4::identity() * 0.5).norm() < 1e-12);
    }

    #[test]
    fn coupled_steady_state_is_physical() {
        let s = lyapunov_steady_state(&SystemParams::reference(0.4 * W)).unwrap();
        assert!(s.is_physical(1e-10));
        let [a, b] = s.symplectic_eigenvalues();
        assert!(a >= 0.5 - 1e-10 && b >= 0.5 - 1e-10, "{a} {b}");
        // Mixed state: the losses thermalise the polaritons slightly.
        assert!(b > 0.5);
    }

    #[test]
    fn relaxation_converges_to_lyapunov_solution() {
        let p = SystemParams::reference(0.4 * W);
        let target = lyapunov_steady_state(&p).unwrap().sigma;
        let dd = drift_diffusion(&p);
        let t_final = 50.0 / p.gamma_a.min(p.gamma_p);
        let dt = 0.5;
        let steps = (t_final / dt).ceil() as usize;
        let end = integrate_covariance(|_| dd.f, &dd.d, Matrix4::identity() * 0.5, 0.0, dt, steps, |_, _, _| {});
        let err = (end - target).amax();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn unstable_has_no_steady_state() {
        let p = SystemParams::reference(0.5 * W).with_delta_a(-W);
        assert!(matches!(lyapunov_steady_state(&p), Err(Error::Unstable { .. })));
    }
}
