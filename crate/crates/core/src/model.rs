//! Effective rotating-frame model: dynamical matrix, polariton branches and
//! the Gaussian drift/diffusion pair shared by both solvers.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::linalg::{c, to_quadrature_basis, CMatrix4, C64, I};
use crate::params::SystemParams;

/// Matrix `K` with `d/dt (a, a†, P, P†) = -i K (a, a†, P, P†)` for the
/// lossless effective Hamiltonian
/// `delta_a a†a + W P†P + i g (a† - a)(P† + P)`, `g = g_eff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalMatrix {
    pub m: CMatrix4,
}

impl DynamicalMatrix {
    /// Generator `-i K` of the lossless Heisenberg equations.
    pub fn generator(&self) -> CMatrix4 {
        self.m * (-I)
    }

    /// Eigenvalues of `K` computed numerically from the real quadrature
    /// form of the generator.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let (f, _) = to_quadrature_basis(&self.generator());
        // -iK has eigenvalues μ, so K has eigenvalues iμ.
        f.complex_eigenvalues().iter().map(|mu| I * mu).collect()
    }
}

/// Swap of annihilation and creation components: `(a, a†, P, P†) ->
/// (a†, a, P†, P)`.
pub fn conjugation_swap() -> CMatrix4 {
    let o = c(1.0);
    let z = c(0.0);
    #[rustfmt::skip]
    let s = CMatrix4::new(
        z, o, z, z,
        o, z, z, z,
        z, z, z, o,
        z, z, o, z,
    );
    s
}

pub fn dynamical_matrix(p: &SystemParams) -> DynamicalMatrix {
    let d = c(p.delta_a());
    let w = c(p.w);
    let ig = I * p.g_eff();
    let z = c(0.0);
    #[rustfmt::skip]
    let m = CMatrix4::new(
        d,   z,  ig,  ig,
        z,  -d,  ig,  ig,
        -ig, ig, w,   z,
        ig, -ig, z,  -w,
    );
    DynamicalMatrix { m }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolaritonBranches {
    pub omega_lower: f64,
    pub omega_upper: f64,
    /// All eigenvalues of the dynamical matrix are real.
    pub stable: bool,
}

impl PolaritonBranches {
    pub fn nearest(&self, omega: f64) -> Branch {
        let w = omega.abs();
        if (w - self.omega_lower).abs() <= (w - self.omega_upper).abs() {
            Branch::Lower
        } else {
            Branch::Upper
        }
    }

    pub fn frequency(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Lower => self.omega_lower,
            Branch::Upper => self.omega_upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Lower,
    Upper,
}

/// Polariton frequencies from the characteristic polynomial of `K`,
/// `w^4 - (delta^2 + W^2) w^2 + delta W (delta W - 4 g^2) = 0`,
/// solved as a quadratic in `w^2`.
pub fn polariton_frequencies(p: &SystemParams) -> PolaritonBranches {
    let d = p.delta_a();
    let w = p.w;
    let g = p.g_eff();
    let sum = d * d + w * w;
    let prod = d * w * (d * w - 4.0 * g * g);
    // sum^2 - 4 prod, rewritten to avoid cancellation at delta = ±W
    let disc = (d * d - w * w).powi(2) + 16.0 * d * w * g * g;
    let scale = sum.max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale * scale;

    if disc >= -tol {
        let root = disc.max(0.0).sqrt();
        let s_hi = 0.5 * (sum + root);
        // Vieta keeps the small root accurate.
        let s_lo = if s_hi > 0.0 { prod / s_hi } else { 0.0 };
        let stable = s_lo >= -1e-14 * scale;
        let lower = s_lo.max(0.0).sqrt();
        let upper = s_hi.max(0.0).sqrt();
        PolaritonBranches {
            omega_lower: lower.min(upper),
            omega_upper: lower.max(upper),
            stable,
        }
    } else {
        // Complex conjugate pair w^2 = s, s̄: every eigenvalue has the same |Re|.
        let s = C64::new(0.5 * sum, 0.5 * (-disc).sqrt());
        let re = s.sqrt().re.abs();
        PolaritonBranches {
            omega_lower: re,
            omega_upper: re,
            stable: false,
        }
    }
}

/// Real drift and diffusion matrices of the quadratures
/// `(x_a, p_a, x_P, p_P)`, `x = (a + a†)/sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDiffusion {
    pub f: Matrix4<f64>,
    pub d: Matrix4<f64>,
}

pub(crate) fn damping(p: &SystemParams) -> Matrix4<f64> {
    Matrix4::from_diagonal(&(Vector4::new(p.gamma_a, p.gamma_a, p.gamma_p, p.gamma_p) * 0.5))
}

/// Diffusion matrix of zero-temperature baths.
pub fn vacuum_diffusion(p: &SystemParams) -> Matrix4<f64> {
    damping(p)
}

pub fn drift_diffusion(p: &SystemParams) -> DriftDiffusion {
    let (lossless, residue) = to_quadrature_basis(&dynamical_matrix(p).generator());
    debug_assert!(residue < 1e-12);
    DriftDiffusion {
        f: lossless - damping(p),
        d: vacuum_diffusion(p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub max_real_part: f64,
    /// `-max_real_part`: how far the slowest mode sits inside the stable half-plane.
    pub margin: f64,
    pub stable: bool,
}

pub fn stability_check(p: &SystemParams) -> StabilityReport {
    let f = drift_diffusion(p).f;
    let max_real_part = f
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    StabilityReport {
        max_real_part,
        margin: -max_real_part,
        stable: max_real_part < 0.0,
    }
}

/// Fails with [`crate::Error::Unstable`] unless the drift is strictly stable.
pub fn require_stable(p: &SystemParams) -> crate::Result<StabilityReport> {
    p.validate().into_result()?;
    let report = stability_check(p);
    if report.stable {
        Ok(report)
    } else {
        Err(crate::Error::Unstable {
            max_real_part: report.max_real_part,
        })
    }
}
