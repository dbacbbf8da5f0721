//! Executes a [`RunConfig`]: dispatch, output files and a one-line
//! `key=value` summary for standard output.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{Experiment, RunConfig};
use crate::experiments::{
    figure2a_spec, figure2b_spec, oracle_compare, run_sweep, squeezing_summary, Grids, SweepAxis, SweepPoint,
    SweepResult,
};
use crate::export::{file_stem, format_number, spectrum_csv, write_file, Provenance, ResultDocument};
use crate::freq::quadrature_spectrum;
use crate::model::{polariton_frequencies, require_stable, stability_check};
use crate::oracle::rwa_validate_with;
use crate::params::SystemParams;
use crate::spectrum::{uniform_grid, NoiseSpectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Success,
    /// The run completed but a validation criterion did not hold.
    ValidationFailed,
    /// Some sweep points had no stationary state.
    Unstable {
        max_real_part: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

fn fmt_num(x: f64) -> String {
    format!("{x:.6e}")
}

struct Ctx<'a> {
    config: &'a RunConfig,
    experiment: Experiment,
    progress: &'a mut dyn FnMut(&str),
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.config.out_dir.join(name);
        self.files.push(write_file(&path, contents)?);
        Ok(())
    }

    fn write_point(
        &mut self,
        experiment: &str,
        axis: SweepAxis,
        point: &SweepPoint,
        spectrum: &NoiseSpectrum,
    ) -> Result<()> {
        let stem = file_stem(experiment, axis, point.value);
        let format = self.config.format;
        if format.csv() {
            self.write(&format!("{stem}.csv"), &spectrum_csv(spectrum)?)?;
        }
        if format.json() {
            let summary = point.summary.clone().ok_or(Error::EmptyResult)?;
            let doc = ResultDocument::new(
                experiment,
                Provenance::new(&point.params).with_axis(axis, point.value),
                point.stability,
                point.branches,
                summary,
                spectrum.clone(),
            );
            self.write(&format!("{stem}.json"), &doc.to_json()?)?;
        }
        Ok(())
    }
}

/// Runs `config.experiment`, which must be set. `progress` receives
/// human-readable status lines.
pub fn run(config: &RunConfig, progress: &mut dyn FnMut(&str)) -> Result<RunOutcome> {
    let experiment = config
        .experiment
        .ok_or_else(|| Error::ConfigParse("no experiment selected".into()))?;
    let mut ctx = Ctx {
        config,
        experiment,
        progress,
        files: Vec::new(),
    };
    let (status, mut summary) = match experiment {
        Experiment::Spectrum => run_spectrum(&mut ctx)?,
        Experiment::Sweep2a | Experiment::Sweep2b => run_figure_sweep(&mut ctx)?,
        Experiment::Polaritons => run_polaritons(&mut ctx)?,
        Experiment::RwaValidate => run_rwa(&mut ctx)?,
        Experiment::OracleCompare => run_oracle(&mut ctx)?,
    };
    let _ = write!(summary, " files={}", ctx.files.len());
    Ok(RunOutcome {
        status,
        summary: format!("experiment={experiment} {summary}"),
        files: ctx.files,
    })
}

fn grids(config: &RunConfig) -> Grids {
    Grids {
        omega: config.omega_grid.clone(),
        theta: config.theta_grid.clone(),
    }
}

fn run_spectrum(ctx: &mut Ctx) -> Result<(RunStatus, String)> {
    let p = ctx.config.params;
    (ctx.progress)(&format!(
        "spectrum: {} x {} grid",
        ctx.config.omega_grid.len(),
        ctx.config.theta_grid.len()
    ));
    let stability = require_stable(&p)?;
    let spectrum = quadrature_spectrum(&p, &ctx.config.omega_grid, &ctx.config.theta_grid)?;
    let branches = polariton_frequencies(&p);
    let summary = squeezing_summary(&spectrum, &branches, &stability)?;
    let point = SweepPoint {
        index: 0,
        value: p.gmod,
        params: p,
        branches,
        stability,
        spectrum: None,
        summary: Some(summary.clone()),
    };
    ctx.write_point("spectrum", SweepAxis::Gmod, &point, &spectrum)?;
    let line = format!(
        "status=ok min_db={} omega_prime={} theta={} stable=true max_re_eig={}",
        fmt_num(summary.s_min_db),
        fmt_num(summary.omega_at_min),
        fmt_num(summary.theta_at_min),
        fmt_num(stability.max_real_part),
    );
    Ok((RunStatus::Success, line))
}

fn run_figure_sweep(ctx: &mut Ctx) -> Result<(RunStatus, String)> {
    let base = ctx.config.params;
    let mut spec = match ctx.experiment {
        Experiment::Sweep2a => figure2a_spec(&base, grids(ctx.config)),
        _ => figure2b_spec(&base, grids(ctx.config)),
    };
    if let Some(values) = &ctx.config.sweep_values {
        spec.values = values.clone();
    }
    (ctx.progress)(&format!(
        "{}: {} points along {}",
        spec.name,
        spec.values.len(),
        spec.axis
    ));
    let result = run_sweep(&spec)?;
    write_sweep(ctx, &result)?;

    let best = result
        .points
        .iter()
        .filter_map(|p| p.summary.as_ref().map(|s| (p, s)))
        .min_by(|a, b| a.1.s_min_db.total_cmp(&b.1.s_min_db));
    let worst_unstable = result
        .unstable_points()
        .map(|p| p.stability.max_real_part)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    for p in result.unstable_points() {
        (ctx.progress)(&format!(
            "{}={}: unstable, max Re eig(f) = {:.6e}; no spectrum written",
            result.axis, p.value, p.stability.max_real_part
        ));
    }

    let mut line = String::new();
    let status = match worst_unstable {
        Some(max_real_part) => {
            line.push_str("status=unstable");
            RunStatus::Unstable { max_real_part }
        }
        None => {
            line.push_str("status=ok");
            RunStatus::Success
        }
    };
    let _ = write!(
        line,
        " points={} unstable={}",
        result.points.len(),
        result.unstable_points().count()
    );
    if let Some((p, s)) = best {
        let _ = write!(
            line,
            " min_db={} at_{}={} omega_prime={} theta={}",
            fmt_num(s.s_min_db),
            result.axis,
            fmt_num(p.value),
            fmt_num(s.omega_at_min),
            fmt_num(s.theta_at_min),
        );
    }
    if let Some(m) = worst_unstable {
        let _ = write!(line, " max_re_eig={}", fmt_num(m));
    }
    Ok((status, line))
}

fn write_sweep(ctx: &mut Ctx, result: &SweepResult) -> Result<()> {
    for point in &result.points {
        if let Some(spectrum) = &point.spectrum {
            ctx.write_point(&result.name, result.axis, point, spectrum)?;
        }
    }
    let mut table = format!(
        "{},omega_lower,omega_upper,stable,max_re_eig,s_min_db,omega_at_min,theta_at_min\n",
        result.axis
    );
    for p in &result.points {
        let (s, w, t) = p
            .summary
            .as_ref()
            .map_or((String::new(), String::new(), String::new()), |s| {
                (
                    format_number(s.s_min_db),
                    format_number(s.omega_at_min),
                    format_number(s.theta_at_min),
                )
            });
        let _ = writeln!(
            table,
            "{},{},{},{},{},{s},{w},{t}",
            format_number(p.value),
            format_number(p.branches.omega_lower),
            format_number(p.branches.omega_upper),
            p.stability.stable,
            format_number(p.stability.max_real_part),
        );
    }
    ctx.write(&format!("{}_summary.csv", result.name), &table)
}

fn run_polaritons(ctx: &mut Ctx) -> Result<(RunStatus, String)> {
    let p = ctx.config.params;
    let table = ctx.config.polaritons;
    (ctx.progress)(&format!("polaritons: {} values of Gmod", table.points));
    let values = uniform_grid(0.0, table.gmod_max, table.points);
    let mut csv = String::from("Gmod,omega_lower,omega_upper,stable,max_re_eig\n");
    let mut unstable = 0;
    for &g in &values {
        let q = SweepAxis::Gmod.apply(&p, g);
        let b = polariton_frequencies(&q);
        let s = stability_check(&q);
        unstable += usize::from(!s.stable);
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            format_number(g),
            format_number(b.omega_lower),
            format_number(b.omega_upper),
            s.stable,
            format_number(s.max_real_part),
        );
    }
    ctx.write("polaritons_Gmod.csv", &csv)?;
    let b = polariton_frequencies(&p);
    let line = format!(
        "status=ok points={} unstable={unstable} omega_lower={} omega_upper={}",
        values.len(),
        fmt_num(b.omega_lower),
        fmt_num(b.omega_upper),
    );
    Ok((RunStatus::Success, line))
}

fn run_rwa(ctx: &mut Ctx) -> Result<(RunStatus, String)> {
    let p: SystemParams = ctx.config.params;
    (ctx.progress)("rwa-validate: propagating the periodic model");
    let report = rwa_validate_with(&p, ctx.config.rwa)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
    ctx.write(
        &format!("{}.json", file_stem("rwa-validate", SweepAxis::Gmod, p.gmod)),
        &(json + "\n"),
    )?;
    let verdict = if report.pass { "pass" } else { "fail" };
    let line = format!(
        "status={verdict} deviation={} threshold={} diverged={} settled={} periods={}",
        fmt_num(report.deviation),
        fmt_num(report.threshold),
        report.diverged,
        report.settled,
        report.periods,
    );
    let status = if report.pass {
        RunStatus::Success
    } else {
        RunStatus::ValidationFailed
    };
    Ok((status, line))
}

fn run_oracle(ctx: &mut Ctx) -> Result<(RunStatus, String)> {
    let p = ctx.config.params;
    (ctx.progress)("oracle-compare: frequency-domain and regression spectra");
    let report = oracle_compare(&p, &ctx.config.omega_grid, &ctx.config.theta_grid)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
    ctx.write(
        &format!("{}.json", file_stem("oracle-compare", SweepAxis::Gmod, p.gmod)),
        &(json + "\n"),
    )?;
    let verdict = if report.pass { "pass" } else { "fail" };
    let line = format!(
        "status={verdict} max_diff_db={} omega_prime={} theta={} threshold_db={}",
        fmt_num(report.max_abs_diff_db),
        fmt_num(report.omega_at_max),
        fmt_num(report.theta_at_max),
        fmt_num(report.threshold_db),
    );
    let status = if report.pass {
        RunStatus::Success
    } else {
        RunStatus::ValidationFailed
    };
    Ok((status, line))
}
