//! Frequency-domain quantum Langevin equations and input-output relations.
//!
//! At analysis frequency `omega'` (rotating frame) the unknowns are
//! `v = (a(w), a†(-w), P(w), P†(-w))` and the inputs
//! `v_in = (a_in(w), a_in†(-w), P_in(w), P_in†(-w))`. The system reads
//! `m v = n v_in`, and the output field is
//! `a_out(w) = a_in(w) + sqrt(gamma_a) a(w)`.

use std::f64::consts::PI;

use nalgebra::Matrix2x4;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{c, CMatrix4, C64, I};
use crate::model::require_stable;
use crate::params::SystemParams;
use crate::spectrum::NoiseSpectrum;
use crate::{Error, Result};

/// `|det m|` below this is reported as a singular system.
pub const SINGULAR_DET: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinSystem {
    pub omega: f64,
    pub m: CMatrix4,
    pub n: CMatrix4,
}

impl LangevinSystem {
    /// Builds the system without checking stability. Solutions of an
    /// unstable system describe no stationary state; use
    /// [`assemble_langevin`] unless that is the point.
    pub fn assemble_unchecked(p: &SystemParams, omega: f64) -> Self {
        let iw = I * omega;
        let d = I * p.delta_a();
        let wp = I * p.w;
        let ha = c(p.gamma_a / 2.0);
        let hp = c(p.gamma_p / 2.0);
        let g = c(p.g_eff());
        let z = c(0.0);
        #[rustfmt::skip]
        let m = CMatrix4::new(
            -iw + d + ha, z,            -g,            -g,
            z,            -iw - d + ha, -g,            -g,
            g,            -g,           -iw + wp + hp, z,
            -g,           g,            z,             -iw - wp + hp,
        );
        let ra = c(-p.gamma_a.sqrt());
        let rp = c(-p.gamma_p.sqrt());
        let n = CMatrix4::from_diagonal(&nalgebra::Vector4::new(ra, ra, rp, rp));
        Self { omega, m, n }
    }

    /// Response of the intracavity vector to the inputs, `m⁻¹ n`.
    pub fn response(&self) -> Result<CMatrix4> {
        let det = self.m.determinant().norm();
        if !(det >= SINGULAR_DET) {
            return Err(Error::Singular { omega: self.omega, det });
        }
        self.m
            .lu()
            .solve(&self.n)
            .ok_or(Error::Singular { omega: self.omega, det })
    }
}

pub fn assemble_langevin(p: &SystemParams, omega: f64) -> Result<LangevinSystem> {
    require_stable(p)?;
    Ok(LangevinSystem::assemble_unchecked(p, omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputPort {
    /// `a_out`, the field the analysis is about.
    Cavity,
    /// `P_out`, through the loss channel of mode P.
    Matter,
}

/// Input-output map at one frequency. Row 0 is `a_out(w)`, row 1 is
/// `a_out†(-w)`, both over `v_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub omega: f64,
    pub t: Matrix2x4<C64>,
}

impl TransferMatrix {
    pub fn from_system(sys: &LangevinSystem, port: OutputPort, p: &SystemParams) -> Result<Self> {
        let x = sys.response()?;
        let (row, rate) = match port {
            OutputPort::Cavity => (0, p.gamma_a),
            OutputPort::Matter => (2, p.gamma_p),
        };
        let k = c(rate.sqrt());
        let mut t = Matrix2x4::<C64>::zeros();
        for r in 0..2 {
            for col in 0..4 {
                t[(r, col)] = k * x[(row + r, col)];
            }
            t[(r, row + r)] += c(1.0);
        }
        Ok(Self { omega: sys.omega, t })
    }

    /// Coefficient of `a_in(w)` in `a_out(w)`.
    pub fn a(&self) -> C64 {
        self.t[(0, 0)]
    }
    /// Coefficient of `a_in†(-w)`.
    pub fn b(&self) -> C64 {
        self.t[(0, 1)]
    }
    /// Coefficient of `P_in(w)`.
    pub fn c(&self) -> C64 {
        self.t[(0, 2)]
    }
    /// Coefficient of `P_in†(-w)`.
    pub fn d(&self) -> C64 {
        self.t[(0, 3)]
    }

    /// `|A|² - |B|² + |C|² - |D|² - 1`; zero when output commutators are preserved.
    pub fn bogoliubov_defect(&self) -> f64 {
        self.a().norm_sqr() - self.b().norm_sqr() + self.c().norm_sqr() - self.d().norm_sqr() - 1.0
    }

    /// Symmetrised, vacuum-normalised noise of `X_theta` at this
    /// frequency, for vacuum inputs.
    pub fn quadrature_noise(&self, theta: f64) -> f64 {
        let ph = C64::from_polar(1.0, -theta);
        let phc = ph.conj();
        (0..4)
            .map(|k| (ph * self.t[(0, k)] + phc * self.t[(1, k)]).norm_sqr())
            .sum::<f64>()
            * 0.5
    }

    /// Coefficients of `S(theta) = c0 + c1 cos 2θ + c2 sin 2θ`.
    pub fn sinusoid(&self) -> (f64, f64, f64) {
        let r1 = self.t.row(0);
        let r2 = self.t.row(1);
        let c0 = 0.5 * (r1.norm_squared() + r2.norm_squared());
        let z: C64 = (0..4).map(|k| r1[k] * r2[k].conj()).sum();
        (c0, z.re, z.im)
    }
}

pub fn output_transfer(p: &SystemParams, omega: f64) -> Result<TransferMatrix> {
    output_transfer_port(p, omega, OutputPort::Cavity)
}

pub fn output_transfer_port(p: &SystemParams, omega: f64, port: OutputPort) -> Result<TransferMatrix> {
    let sys = assemble_langevin(p, omega)?;
    TransferMatrix::from_system(&sys, port, p)
}

/// Transfer matrices over a frequency grid, in grid order.
pub fn transfer_grid(p: &SystemParams, omega_grid: &[f64]) -> Result<Vec<TransferMatrix>> {
    if omega_grid.is_empty() {
        return Err(Error::EmptyGrid("omega"));
    }
    require_stable(p)?;
    omega_grid
        .par_iter()
        .map(|&w| TransferMatrix::from_system(&LangevinSystem::assemble_unchecked(p, w), OutputPort::Cavity, p))
        .collect()
}

pub fn spectrum_from_transfers(transfers: &[TransferMatrix], theta_grid: &[f64]) -> NoiseSpectrum {
    let s = transfers
        .iter()
        .map(|t| theta_grid.iter().map(|&th| t.quadrature_noise(th)).collect())
        .collect();
    NoiseSpectrum::from_linear(transfers.iter().map(|t| t.omega).collect(), theta_grid.to_vec(), s)
}

/// Output quadrature spectrum `S(omega', theta)` of `a_out` with vacuum inputs.
pub fn quadrature_spectrum(p: &SystemParams, omega_grid: &[f64], theta_grid: &[f64]) -> Result<NoiseSpectrum> {
    if theta_grid.is_empty() {
        return Err(Error::EmptyGrid("theta"));
    }
    let transfers = transfer_grid(p, omega_grid)?;
    Ok(spectrum_from_transfers(&transfers, theta_grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureExtrema {
    pub theta_min: f64,
    pub s_min: f64,
    pub theta_max: f64,
    pub s_max: f64,
}

impl TransferMatrix {
    /// Extremal quadratures from the closed form in `2θ`. Angles are
    /// reported in `[0, pi)`; isotropic noise reports `theta_min = 0`.
    pub fn extrema(&self) -> QuadratureExtrema {
        let (c0, c1, c2) = self.sinusoid();
        let amp = c1.hypot(c2);
        if amp <= 1e-15 * c0 {
            return QuadratureExtrema {
                theta_min: 0.0,
                s_min: c0,
                theta_max: PI / 2.0,
                s_max: c0,
            };
        }
        let theta_max = (0.5 * c2.atan2(c1)).rem_euclid(PI);
        let theta_min = (theta_max + PI / 2.0).rem_euclid(PI);
        QuadratureExtrema {
            theta_min,
            s_min: c0 - amp,
            theta_max,
            s_max: c0 + amp,
        }
    }
}

pub fn optimal_angle(p: &SystemParams, omega: f64) -> Result<QuadratureExtrema> {
    Ok(output_transfer(p, omega)?.extrema())
}

/// `m(w)` and the block swap of `m(-w)` conjugated; equal for a
/// consistent system.
pub fn mirror_pair(p: &SystemParams, omega: f64) -> (CMatrix4, CMatrix4) {
    let s = crate::model::conjugation_swap();
    let m = LangevinSystem::assemble_unchecked(p, omega).m;
    let mirrored = s * LangevinSystem::assemble_unchecked(p, -omega).m.map(|z| z.conj()) * s;
    (m, mirrored)
}
