//! Parameter sweeps of the reference figure, squeezing summaries and the
//! dual-method comparison.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::freq::quadrature_spectrum;
use crate::model::{polariton_frequencies, stability_check, Branch, PolaritonBranches, StabilityReport};
use crate::oracle::output_spectrum_regression;
use crate::params::SystemParams;
use crate::spectrum::{default_omega_grid, default_theta_grid, NoiseSpectrum};
use crate::{Error, Result};

/// Modulation amplitudes of the strong-to-ultrastrong series, in units of `W`.
pub const FIGURE2A_GMOD: [f64; 3] = [0.01, 0.1, 0.4];
/// Modulation amplitude of the detuning series, in units of `W`.
pub const FIGURE2B_GMOD: f64 = 0.5;
/// Detunings of the detuning series, in units of `W`.
pub const FIGURE2B_DELTA: [f64; 4] = [1.0, 0.0, -0.5, -1.0];
/// Dual-method agreement threshold in dB.
pub const ORACLE_TOLERANCE_DB: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Sets `Gmod` and ties `G0` to it.
    #[serde(rename = "Gmod")]
    Gmod,
    #[serde(rename = "delta_a")]
    DeltaA,
    #[serde(rename = "omega_G")]
    OmegaG,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Gmod => "Gmod",
            SweepAxis::DeltaA => "delta_a",
            SweepAxis::OmegaG => "omega_G",
        }
    }

    pub fn apply(self, base: &SystemParams, value: f64) -> SystemParams {
        match self {
            SweepAxis::Gmod => base.with_gmod(value).with_g0(value),
            SweepAxis::DeltaA => base.with_delta_a(value),
            SweepAxis::OmegaG => base.with_omega_g(value),
        }
    }

    pub fn value_of(self, p: &SystemParams) -> f64 {
        match self {
            SweepAxis::Gmod => p.gmod,
            SweepAxis::DeltaA => p.delta_a(),
            SweepAxis::OmegaG => p.omega_g,
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
}

impl Grids {
    /// `omega'` in `[-3W, 3W]` on 2001 points and the two plotted angles.
    pub fn default_for(p: &SystemParams) -> Self {
        Self {
            omega: default_omega_grid(p.w),
            theta: default_theta_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: SystemParams,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub grids: Grids,
}

impl SweepSpec {
    pub fn params(&self) -> impl Iterator<Item = SystemParams> + '_ {
        self.values.iter().map(|&v| self.axis.apply(&self.base, v))
    }

    pub fn check(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::EmptyGrid("sweep"));
        }
        if self.grids.omega.is_empty() {
            return Err(Error::EmptyGrid("omega"));
        }
        if self.grids.theta.is_empty() {
            return Err(Error::EmptyGrid("theta"));
        }
        for p in self.params() {
            p.validate().into_result()?;
        }
        Ok(())
    }
}

/// Minimum of the spectrum at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleMinimum {
    pub theta: f64,
    pub s_min_db: f64,
    pub omega_at_min: f64,
    pub nearest_branch: Branch,
    /// Minimum restricted to `omega' > 0`, if the grid has such points.
    pub positive_s_min_db: Option<f64>,
    pub positive_omega_at_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingSummary {
    pub s_min_db: f64,
    pub omega_at_min: f64,
    pub theta_at_min: f64,
    /// Minimum at `theta_at_min + pi/2`, when that angle is on the grid.
    pub s_min_orthogonal_db: Option<f64>,
    pub omega_at_min_orthogonal: Option<f64>,
    pub polariton_lower: f64,
    pub polariton_upper: f64,
    pub stable: bool,
    pub per_angle: Vec<AngleMinimum>,
}

impl SqueezingSummary {
    pub fn branches(&self) -> PolaritonBranches {
        PolaritonBranches {
            omega_lower: self.polariton_lower,
            omega_upper: self.polariton_upper,
            stable: self.stable,
        }
    }

    pub fn angle(&self, theta: f64) -> Option<&AngleMinimum> {
        self.per_angle.iter().find(|m| (m.theta - theta).abs() < 1e-12)
    }
}

/// Grid argmin over all angles and per angle. Ties go to the lowest
/// `omega'`, then the lowest `theta`.
pub fn squeezing_summary(
    spectrum: &NoiseSpectrum,
    branches: &PolaritonBranches,
    stability: &StabilityReport,
) -> Result<SqueezingSummary> {
    let best = spectrum.min().ok_or(Error::EmptyResult)?;
    let orthogonal = spectrum
        .theta_index_mod_pi(best.theta + FRAC_PI_2)
        .and_then(|j| spectrum.min_where([j], |_| true));

    let mut order: Vec<usize> = (0..spectrum.theta_grid.len()).collect();
    order.sort_by(|&a, &b| spectrum.theta_grid[a].total_cmp(&spectrum.theta_grid[b]));
    let per_angle = order
        .into_iter()
        .filter_map(|j| {
            let m = spectrum.min_where([j], |_| true)?;
            let pos = spectrum.min_where([j], |w| w > 0.0);
            Some(AngleMinimum {
                theta: m.theta,
                s_min_db: m.s_db,
                omega_at_min: m.omega,
                nearest_branch: branches.nearest(m.omega),
                positive_s_min_db: pos.map(|g| g.s_db),
                positive_omega_at_min: pos.map(|g| g.omega),
            })
        })
        .collect();

    Ok(SqueezingSummary {
        s_min_db: best.s_db,
        omega_at_min: best.omega,
        theta_at_min: best.theta,
        s_min_orthogonal_db: orthogonal.map(|g| g.s_db),
        omega_at_min_orthogonal: orthogonal.map(|g| g.omega),
        polariton_lower: branches.omega_lower,
        polariton_upper: branches.omega_upper,
        stable: stability.stable,
        per_angle,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    pub params: SystemParams,
    pub branches: PolaritonBranches,
    pub stability: StabilityReport,
    /// Absent for unstable points, which have no stationary spectrum.
    pub spectrum: Option<NoiseSpectrum>,
    pub summary: Option<SqueezingSummary>,
}

impl SweepPoint {
    pub fn is_stable(&self) -> bool {
        self.stability.stable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn unstable_points(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| !p.is_stable())
    }

    pub fn point(&self, value: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| (p.value - value).abs() <= 1e-12 * value.abs().max(1.0))
    }
}

fn run_point(index: usize, value: f64, params: SystemParams, grids: &Grids) -> Result<SweepPoint> {
    let branches = polariton_frequencies(&params);
    let stability = stability_check(&params);
    let (spectrum, summary) = if stability.stable {
        let s = quadrature_spectrum(&params, &grids.omega, &grids.theta)?;
        let summary = squeezing_summary(&s, &branches, &stability)?;
        (Some(s), Some(summary))
    } else {
        (None, None)
    };
    Ok(SweepPoint {
        index,
        value,
        params,
        branches,
        stability,
        spectrum,
        summary,
    })
}

/// Evaluates every sweep point. Unstable points are recorded without a
/// spectrum; results are ordered by sweep index.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.check()?;
    let points = spec
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| run_point(i, v, spec.axis.apply(&spec.base, v), &spec.grids))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        name: spec.name.clone(),
        axis: spec.axis,
        points,
    })
}

/// Modulation series at fixed losses and `omega_G`.
pub fn figure2a_spec(base: &SystemParams, grids: Grids) -> SweepSpec {
    SweepSpec {
        name: "sweep-2a".into(),
        base: *base,
        axis: SweepAxis::Gmod,
        values: FIGURE2A_GMOD.iter().map(|k| k * base.w).collect(),
        grids,
    }
}

/// Detuning series at the base `Gmod`.
pub fn figure2b_spec(base: &SystemParams, grids: Grids) -> SweepSpec {
    SweepSpec {
        name: "sweep-2b".into(),
        base: *base,
        axis: SweepAxis::DeltaA,
        values: FIGURE2B_DELTA.iter().map(|k| k * base.w).collect(),
        grids,
    }
}

/// Reference losses with `Gmod = G0` swept over `{0.01, 0.1, 0.4} W`.
pub fn figure2a_sweep() -> Result<SweepResult> {
    let base = SystemParams::reference(0.0);
    run_sweep(&figure2a_spec(&base, Grids::default_for(&base)))
}

/// Reference losses with `Gmod = G0 = W/2` and `delta_a` in `{W, 0, -W/2, -W}`.
pub fn figure2b_sweep() -> Result<SweepResult> {
    let base = SystemParams::reference(FIGURE2B_GMOD * 0.1);
    run_sweep(&figure2b_spec(&base, Grids::default_for(&base)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub max_abs_diff_db: f64,
    pub omega_at_max: f64,
    pub theta_at_max: f64,
    pub threshold_db: f64,
    pub pass: bool,
}

/// Runs both solvers on the same grid and reports the largest dB gap.
pub fn oracle_compare(p: &SystemParams, omega_grid: &[f64], theta_grid: &[f64]) -> Result<ComparisonReport> {
    let freq = quadrature_spectrum(p, omega_grid, theta_grid)?;
    let time = output_spectrum_regression(p, omega_grid, theta_grid)?;
    let mut report = ComparisonReport {
        max_abs_diff_db: 0.0,
        omega_at_max: omega_grid[0],
        theta_at_max: theta_grid[0],
        threshold_db: ORACLE_TOLERANCE_DB,
        pass: true,
    };
    for (i, &omega) in omega_grid.iter().enumerate() {
        for (j, &theta) in theta_grid.iter().enumerate() {
            let diff = (freq.db_at(i, j) - time.db_at(i, j)).abs();
            if !(diff <= report.max_abs_diff_db) {
                report.max_abs_diff_db = diff;
                report.omega_at_max = omega;
                report.theta_at_max = theta;
            }
        }
    }
    report.pass = report.max_abs_diff_db <= ORACLE_TOLERANCE_DB;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const W: f64 = 0.1;

    #[test]
    fn flat_spectrum_summary() {
        let s = NoiseSpectrum::from_linear(vec![-0.1, 0.0, 0.1], default_theta_grid(), vec![vec![1.0; 2]; 3]);
        let p = SystemParams::reference(0.0);
        let sum = squeezing_summary(&s, &polariton_frequencies(&p), &stability_check(&p)).unwrap();
        assert_eq!(sum.s_min_db, 0.0);
        assert_eq!(sum.omega_at_min, -0.1);
        assert_eq!(sum.theta_at_min, PI / 6.0);
        assert_eq!(sum.s_min_orthogonal_db, Some(0.0));
        assert!(sum.stable);
    }

    #[test]
    fn stable_flag_mirrors_stability_check() {
        let p = SystemParams::reference(0.5 * W).with_delta_a(-W);
        let s = NoiseSpectrum::from_linear(vec![0.0], vec![0.0], vec![vec![1.0]]);
        let stab = stability_check(&p);
        let sum = squeezing_summary(&s, &polariton_frequencies(&p), &stab).unwrap();
        assert_eq!(sum.stable, stab.stable);
        assert!(!sum.stable);
    }

    #[test]
    fn empty_spectrum_has_no_summary() {
        let s = NoiseSpectrum::from_linear(vec![], vec![0.0], vec![]);
        let p = SystemParams::reference(0.0);
        assert!(matches!(
            squeezing_summary(&s, &polariton_frequencies(&p), &stability_check(&p)),
            Err(Error::EmptyResult)
        ));
    }

    #[test]
    fn axis_application() {
        let base = SystemParams::reference(0.02);
        let p = SweepAxis::Gmod.apply(&base, 0.03);
        assert_eq!((p.gmod, p.g0), (0.03, 0.03));
        assert!((SweepAxis::DeltaA.apply(&base, -0.05).delta_a() + 0.05).abs() < 1e-15);
        assert_eq!(SweepAxis::OmegaG.apply(&base, 0.8).omega_g, 0.8);
    }

    #[test]
    fn sweep_records_unstable_points() {
        let base = SystemParams::reference(0.5 * W);
        let grids = Grids {
            omega: vec![-0.1, 0.0, 0.1],
            theta: default_theta_grid(),
        };
        let r = run_sweep(&figure2b_spec(&base, grids)).unwrap();
        let flags: Vec<bool> = r.points.iter().map(SweepPoint::is_stable).collect();
        assert_eq!(flags, [true, true, false, false]);
        assert!(r.points[3].spectrum.is_none());
        assert_eq!(r.unstable_points().count(), 2);
        let idx: Vec<usize> = r.points.iter().map(|p| p.index).collect();
        assert_eq!(idx, [0, 1, 2, 3]);
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let base = SystemParams::reference(0.01);
        let mut spec = figure2a_spec(&base, Grids::default_for(&base));
        spec.values.clear();
        assert!(matches!(run_sweep(&spec), Err(Error::EmptyGrid("sweep"))));
    }

    #[test]
    fn compare_without_coupling_is_exact() {
        let p = SystemParams::reference(0.0);
        let r = oracle_compare(&p, &[-0.2, 0.0, 0.2], &default_theta_grid()).unwrap();
        assert!(r.max_abs_diff_db < 1e-12);
        assert!(r.pass);
    }
}
