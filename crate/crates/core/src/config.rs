//! Run configuration in TOML. Syntax errors, unknown keys, wrong types and
//! missing required keys are [`Error::ConfigParse`]; well-formed documents
//! with unusable values are [`Error::ConfigDomain`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::export::OutputFormat;
use crate::oracle::RwaOptions;
use crate::params::{CouplingConvention, SystemParams, OMEGA_A};
use crate::spectrum::{default_theta_grid, uniform_grid, DEFAULT_OMEGA_POINTS};
use crate::{Error, Result};

/// Upper bound on grid sizes accepted from a config file.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    #[serde(rename = "sweep-2a")]
    Sweep2a,
    #[serde(rename = "sweep-2b")]
    Sweep2b,
    Polaritons,
    RwaValidate,
    OracleCompare,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Spectrum,
        Experiment::Sweep2a,
        Experiment::Sweep2b,
        Experiment::Polaritons,
        Experiment::RwaValidate,
        Experiment::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Sweep2a => "sweep-2a",
            Experiment::Sweep2b => "sweep-2b",
            Experiment::Polaritons => "polaritons",
            Experiment::RwaValidate => "rwa-validate",
            Experiment::OracleCompare => "oracle-compare",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::ConfigParse(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    params: RawParams,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    polaritons: RawPolaritons,
    #[serde(default)]
    rwa: RawRwa,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "W")]
    w: f64,
    #[serde(rename = "omega_G")]
    omega_g: Option<f64>,
    delta_a: Option<f64>,
    #[serde(rename = "Gmod")]
    gmod: f64,
    #[serde(rename = "G0")]
    g0: Option<f64>,
    gamma_a: f64,
    #[serde(rename = "gamma_P")]
    gamma_p: f64,
    #[serde(default)]
    convention: CouplingConvention,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    omega_points: Option<i64>,
    thetas: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolaritons {
    gmod_max: Option<f64>,
    points: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRwa {
    t_final: Option<f64>,
    threshold: Option<f64>,
    steps_per_period: Option<i64>,
    average_periods: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    threads: Option<i64>,
}

/// Range of the polariton-branch table, `Gmod` from 0 to `gmod_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonTable {
    pub gmod_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` when the selector is left to the command line.
    pub experiment: Option<Experiment>,
    pub params: SystemParams,
    pub omega_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    /// Overrides the built-in sweep values, in absolute units.
    pub sweep_values: Option<Vec<f64>>,
    pub polaritons: PolaritonTable,
    pub rwa: RwaOptions,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// `Some(0)` means automatic.
    pub threads: Option<usize>,
}

fn domain(msg: impl Into<String>) -> Error {
    Error::ConfigDomain(msg.into())
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}

fn count(name: &str, v: i64, min: usize) -> Result<usize> {
    match usize::try_from(v) {
        Ok(n) if n >= min && n <= MAX_GRID_POINTS => Ok(n),
        _ => Err(domain(format!("{name} must be in [{min}, {MAX_GRID_POINTS}], got {v}"))),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.message().to_string()))?;
    let rp = raw.params;

    let omega_g = match (rp.omega_g, rp.delta_a) {
        (Some(_), Some(_)) => {
            return Err(Error::ConfigParse("give either omega_G or delta_a, not both".into()));
        }
        (None, None) => return Err(Error::ConfigParse("missing omega_G (or delta_a)".into())),
        (Some(w), None) => finite("omega_G", w)?,
        (None, Some(d)) => OMEGA_A - finite("delta_a", d)?,
    };
    let gmod = finite("Gmod", rp.gmod)?;
    let params = SystemParams {
        w: finite("W", rp.w)?,
        omega_g,
        g0: finite("G0", rp.g0.unwrap_or(gmod))?,
        gmod,
        gamma_a: finite("gamma_a", rp.gamma_a)?,
        gamma_p: finite("gamma_P", rp.gamma_p)?,
        convention: rp.convention,
    };
    let report = params.validate();
    if !report.is_valid() {
        let msgs: Vec<String> = report.errors.iter().map(ToString::to_string).collect();
        return Err(domain(msgs.join("; ")));
    }

    let g = raw.grid;
    let omega_min = finite("grid.omega_min", g.omega_min.unwrap_or(-3.0 * params.w))?;
    let omega_max = finite("grid.omega_max", g.omega_max.unwrap_or(3.0 * params.w))?;
    let omega_points = match g.omega_points {
        Some(n) => count("grid.omega_points", n, 1)?,
        None => DEFAULT_OMEGA_POINTS,
    };
    if omega_points > 1 && !(omega_min < omega_max) {
        return Err(domain(format!(
            "grid.omega_min ({omega_min}) must be below grid.omega_max ({omega_max})"
        )));
    }
    let theta_grid = match g.thetas {
        Some(t) if t.is_empty() => return Err(domain("grid.thetas must not be empty")),
        Some(t) if t.len() > MAX_GRID_POINTS => return Err(domain("grid.thetas is too long")),
        Some(t) => t
            .into_iter()
            .map(|th| finite("grid.thetas entry", th))
            .collect::<Result<Vec<_>>>()?,
        None => default_theta_grid(),
    };

    let sweep_values = match raw.sweep.values {
        Some(v) if v.is_empty() => return Err(domain("sweep.values must not be empty")),
        Some(v) => Some(
            v.into_iter()
                .map(|x| finite("sweep.values entry", x))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    let polaritons = PolaritonTable {
        gmod_max: finite("polaritons.gmod_max", raw.polaritons.gmod_max.unwrap_or(0.5 * params.w))?,
        points: match raw.polaritons.points {
            Some(n) => count("polaritons.points", n, 1)?,
            None => 101,
        },
    };
    if polaritons.gmod_max < 0.0 {
        return Err(domain("polaritons.gmod_max must be >= 0"));
    }

    let defaults = RwaOptions::default();
    let rwa = RwaOptions {
        t_final: match raw.rwa.t_final {
            Some(t) if !(t.is_finite() && t > 0.0) => return Err(domain("rwa.t_final must be finite and > 0")),
            t => t,
        },
        threshold: match raw.rwa.threshold {
            Some(t) if !(t.is_finite() && t > 0.0) => return Err(domain("rwa.threshold must be finite and > 0")),
            t => t.unwrap_or(defaults.threshold),
        },
        steps_per_period: match raw.rwa.steps_per_period {
            Some(n) => count("rwa.steps_per_period", n, crate::oracle::STEPS_PER_PERIOD_MIN)?,
            None => defaults.steps_per_period,
        },
        average_periods: match raw.rwa.average_periods {
            Some(n) => count("rwa.average_periods", n, 1)?,
            None => defaults.average_periods,
        },
    };

    let threads = match raw.run.threads {
        Some(n) => Some(usize::try_from(n).map_err(|_| domain(format!("run.threads must be >= 0, got {n}")))?),
        None => None,
    };

    Ok(RunConfig {
        experiment: raw.experiment,
        params,
        omega_grid: uniform_grid(omega_min, omega_max, omega_points),
        theta_grid,
        sweep_values,
        polaritons,
        rwa,
        out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
        format: raw.output.format.unwrap_or_default(),
        threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const MINIMAL: &str = r#"
        [params]
        W = 0.1
        omega_G = 0.9
        Gmod = 0.04
        gamma_a = 0.1
        gamma_P = 0.0033333333333333335
    "#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.experiment, None);
        assert_eq!(c.theta_grid, vec![PI / 6.0, 2.0 * PI / 3.0]);
        assert_eq!(c.omega_grid.len(), 2001);
        assert_eq!(c.omega_grid[0], -0.30000000000000004);
        assert_eq!(c.params.g0, 0.04);
        assert_eq!(c.params.gamma_p, 0.1 / 30.0);
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.threads, None);
    }

    #[test]
    fn negative_w_is_a_domain_error() {
        let text = MINIMAL.replace("W = 0.1", "W = -0.1");
        assert!(matches!(parse_config(&text), Err(Error::ConfigDomain(_))));
    }

    #[test]
    fn non_finite_is_a_domain_error() {
        let text = MINIMAL.replace("Gmod = 0.04", "Gmod = nan");
        assert!(matches!(parse_config(&text), Err(Error::ConfigDomain(_))));
        let text = MINIMAL.replace("W = 0.1", "W = inf");
        assert!(matches!(parse_config(&text), Err(Error::ConfigDomain(_))));
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let text = format!("{MINIMAL}\nextra = 1\n");
        assert!(matches!(parse_config(&text), Err(Error::ConfigParse(_))));
        let text = MINIMAL.replace("Gmod", "Gmodd");
        assert!(matches!(parse_config(&text), Err(Error::ConfigParse(_))));
        let text = format!("{MINIMAL}\n[grid]\nomega_step = 0.1\n");
        assert!(matches!(parse_config(&text), Err(Error::ConfigParse(_))));
    }

    #[test]
    fn malformed_documents_are_parse_errors() {
        for text in ["[params", "W = ", "", "experiment = \"fig3\"\n[params]\nW=0.1"] {
            assert!(matches!(parse_config(text), Err(Error::ConfigParse(_))), "{text}");
        }
        let text = MINIMAL.replace("W = 0.1", "W = \"0.1\"");
        assert!(matches!(parse_config(&text), Err(Error::ConfigParse(_))));
    }

    #[test]
    fn detuning_alternative() {
        let text = MINIMAL.replace("omega_G = 0.9", "delta_a = -0.05");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.params.omega_g, 1.05);
        let both = MINIMAL.replace("omega_G = 0.9", "omega_G = 0.9\ndelta_a = 0.1");
        assert!(matches!(parse_config(&both), Err(Error::ConfigParse(_))));
    }

    #[test]
    fn grid_domain_checks() {
        let bad = [
            "[grid]\nomega_points = 0",
            "[grid]\nomega_points = -5",
            "[grid]\nomega_min = 0.2\nomega_max = 0.1",
            "[grid]\nthetas = []",
            "[run]\nthreads = -1",
            "[rwa]\nsteps_per_period = 10",
        ];
        for extra in bad {
            let text = format!("{MINIMAL}\n{extra}\n");
            assert!(matches!(parse_config(&text), Err(Error::ConfigDomain(_))), "{extra}");
        }
    }

    #[test]
    fn full_config() {
        let text = format!(
            "experiment = \"rwa-validate\"\n{MINIMAL}\nconvention = \"full\"\n[output]\ndir = \"res\"\nformat = \"both\"\n[run]\nthreads = 3\n[rwa]\nthreshold = 0.05\n"
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.experiment, Some(Experiment::RwaValidate));
        assert_eq!(c.params.convention, CouplingConvention::Full);
        assert_eq!(c.out_dir, PathBuf::from("res"));
        assert_eq!(c.format, OutputFormat::Both);
        assert_eq!(c.threads, Some(3));
        assert_eq!(c.rwa.threshold, 0.05);
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }
}
