//! Physical parameters of the two-mode system.
//!
//! All frequencies and rates are expressed in units of the cavity frequency
//! `omega_a`, which is fixed to 1, with `hbar = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Cavity mode frequency; the unit of every other frequency.
pub const OMEGA_A: f64 = 1.0;

/// Which coupling strength enters the frequency-domain equations.
///
/// `Half` uses `Gmod/2`, the value left after the rotating-wave
/// approximation of the modulated coupling. `Full` uses `Gmod` directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingConvention {
    #[default]
    Half,
    Full,
}

impl CouplingConvention {
    pub fn factor(self) -> f64 {
        match self {
            CouplingConvention::Half => 0.5,
            CouplingConvention::Full => 1.0,
        }
    }
}

impl fmt::Display for CouplingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingConvention::Half => "half",
            CouplingConvention::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Frequency of the second bosonic mode P.
    #[serde(rename = "W")]
    pub w: f64,
    /// Modulation frequency of the coupling (also the rotating-frame frequency).
    #[serde(rename = "omega_G")]
    pub omega_g: f64,
    /// Static part of the coupling.
    #[serde(rename = "G0")]
    pub g0: f64,
    /// Modulation amplitude of the coupling.
    #[serde(rename = "Gmod")]
    pub gmod: f64,
    /// Energy damping rate of the cavity mode.
    pub gamma_a: f64,
    /// Energy damping rate of mode P.
    #[serde(rename = "gamma_P")]
    pub gamma_p: f64,
    #[serde(default)]
    pub convention: CouplingConvention,
}

impl SystemParams {
    pub fn new(w: f64, omega_g: f64, g0: f64, gmod: f64, gamma_a: f64, gamma_p: f64) -> Self {
        Self {
            w,
            omega_g,
            g0,
            gmod,
            gamma_a,
            gamma_p,
            convention: CouplingConvention::Half,
        }
    }

    /// Losses and mode frequency of the reference figure: `W = 0.1`,
    /// `gamma_a = 0.1`, `gamma_P = W/30`, `omega_G = 0.9`, with
    /// `G0 = Gmod` so that `G0 >= Gmod` and `G0 + Gmod <= W` hold up to
    /// `Gmod = W/2`.
    pub fn reference(gmod: f64) -> Self {
        let w = 0.1;
        Self::new(w, 0.9, gmod, gmod, 0.1, w / 30.0)
    }

    /// Detuning of the cavity from the modulation, `omega_a - omega_G`.
    pub fn delta_a(&self) -> f64 {
        OMEGA_A - self.omega_g
    }

    /// Coupling strength in the effective (rotating-frame) Hamiltonian.
    pub fn g_eff(&self) -> f64 {
        self.convention.factor() * self.gmod
    }

    pub fn with_gmod(mut self, gmod: f64) -> Self {
        self.gmod = gmod;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self
    }

    /// Sets `omega_G` so that `omega_a - omega_G = delta_a`.
    pub fn with_delta_a(mut self, delta_a: f64) -> Self {
        self.omega_g = OMEGA_A - delta_a;
        self
    }

    pub fn with_omega_g(mut self, omega_g: f64) -> Self {
        self.omega_g = omega_g;
        self
    }

    pub fn with_convention(mut self, convention: CouplingConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ParamIssue {
    NonFinite(&'static str),
    NonPositive(&'static str),
    Negative(&'static str),
    /// `W < omega_G` is violated.
    ModeAboveModulation,
    /// `G0 + Gmod` is not small against `omega_G`.
    CouplingNotSmall {
        ratio: f64,
    },
    /// `G0 + Gmod <= W` is violated.
    CouplingExceedsW,
    /// `G0 >= Gmod` is violated.
    ModulationExceedsStatic,
}

impl fmt::Display for ParamIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamIssue::NonFinite(name) => write!(f, "{name} is not finite"),
            ParamIssue::NonPositive(name) => write!(f, "{name} must be > 0"),
            ParamIssue::Negative(name) => write!(f, "{name} must be >= 0"),
            ParamIssue::ModeAboveModulation => write!(f, "W < omega_G violated"),
            ParamIssue::CouplingNotSmall { ratio } => write!(
                f,
                "(G0 + Gmod)/omega_G = {ratio:.3} exceeds {REGIME_RATIO}; rotating-wave regime doubtful"
            ),
            ParamIssue::CouplingExceedsW => write!(f, "G0 + Gmod <= W violated"),
            ParamIssue::ModulationExceedsStatic => write!(f, "G0 >= Gmod violated"),
        }
    }
}

/// Largest `(G0 + Gmod)/omega_G` accepted without a regime warning.
pub const REGIME_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<ParamIssue>,
    pub warnings: Vec<ParamIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }

    pub fn into_result(self) -> crate::Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            let msg = self
                .errors
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            Err(crate::Error::InvalidParams(msg))
        }
    }
}

/// Checks parameter domains (errors) and the modelling regime (warnings).
/// Never fails; the caller decides what to do with the report.
pub fn validate_params(p: &SystemParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let positive = [
        ("W", p.w),
        ("omega_G", p.omega_g),
        ("gamma_a", p.gamma_a),
        ("gamma_P", p.gamma_p),
    ];
    let non_negative = [("G0", p.g0), ("Gmod", p.gmod)];

    for (name, value) in positive {
        if !value.is_finite() {
            report.errors.push(ParamIssue::NonFinite(name));
        } else if value <= 0.0 {
            report.errors.push(ParamIssue::NonPositive(name));
        }
    }
    for (name, value) in non_negative {
        if !value.is_finite() {
            report.errors.push(ParamIssue::NonFinite(name));
        } else if value < 0.0 {
            report.errors.push(ParamIssue::Negative(name));
        }
    }
    if !report.errors.is_empty() {
        return report;
    }

    if p.w >= p.omega_g {
        report.warnings.push(ParamIssue::ModeAboveModulation);
    }
    let ratio = (p.g0 + p.gmod) / p.omega_g;
    if ratio > REGIME_RATIO {
        report.warnings.push(ParamIssue::CouplingNotSmall { ratio });
    }
    if p.g0 + p.gmod > p.w {
        report.warnings.push(ParamIssue::CouplingExceedsW);
    }
    if p.g0 < p.gmod {
        report.warnings.push(ParamIssue::ModulationExceedsStatic);
    }
    report
}
