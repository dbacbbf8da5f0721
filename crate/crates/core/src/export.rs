//! Byte-deterministic CSV and JSON serialisation of spectra.
//!
//! CSV rows follow `omega_prime,theta,S_linear,S_dB` with `omega'` outer and
//! `theta` inner, every number in scientific notation with 12 significant
//! digits. JSON documents embed the exact parameters used so the spectrum
//! can be recomputed from the file alone.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{SqueezingSummary, SweepAxis};
use crate::freq::quadrature_spectrum;
use crate::model::{PolaritonBranches, StabilityReport};
use crate::params::{SystemParams, OMEGA_A};
use crate::spectrum::NoiseSpectrum;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "omega_prime,theta,S_linear,S_dB";
/// Identifies the JSON layout; bumped on any incompatible change.
pub const DOCUMENT_FORMAT: &str = "usc-squeeze.spectrum.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("unknown format `{other}` (expected csv, json or both)")),
        }
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_csv(spectrum: &NoiseSpectrum, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (i, &omega) in spectrum.omega_grid.iter().enumerate() {
        for (j, &theta) in spectrum.theta_grid.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                format_number(omega),
                format_number(theta),
                format_number(spectrum.at(i, j)),
                format_number(spectrum.db_at(i, j)),
            )?;
        }
    }
    Ok(())
}

pub fn spectrum_csv(spectrum: &NoiseSpectrum) -> Result<String> {
    spectrum.check()?;
    let mut buf = Vec::new();
    write_csv(spectrum, &mut buf).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("ASCII output"))
}

/// Parameters and frame information attached to every exported spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub params: SystemParams,
    /// Cavity frequency, the unit of every rate.
    pub omega_a: f64,
    pub delta_a: f64,
    pub g_eff: f64,
    /// `omega' = omega - omega_G`; lab-frame `omega` is `omega' + omega_G`.
    pub frame: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis_value: Option<f64>,
    pub generator: String,
}

impl Provenance {
    pub fn new(params: &SystemParams) -> Self {
        Self {
            params: *params,
            omega_a: OMEGA_A,
            delta_a: params.delta_a(),
            g_eff: params.g_eff(),
            frame: "rotating at omega_G".into(),
            axis: None,
            axis_value: None,
            generator: concat!("usc-squeeze ", env!("CARGO_PKG_VERSION")).into(),
        }
    }

    pub fn with_axis(mut self, axis: SweepAxis, value: f64) -> Self {
        self.axis = Some(axis);
        self.axis_value = Some(value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub format: String,
    pub experiment: String,
    pub provenance: Provenance,
    pub stability: StabilityReport,
    pub branches: PolaritonBranches,
    pub summary: SqueezingSummary,
    pub spectrum: NoiseSpectrum,
}

impl ResultDocument {
    pub fn new(
        experiment: &str,
        provenance: Provenance,
        stability: StabilityReport,
        branches: PolaritonBranches,
        summary: SqueezingSummary,
        spectrum: NoiseSpectrum,
    ) -> Self {
        Self {
            format: DOCUMENT_FORMAT.into(),
            experiment: experiment.into(),
            provenance,
            stability,
            branches,
            summary,
            spectrum,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        self.spectrum.check()?;
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Document(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Parses and checks a result document.
pub fn load_result_document(text: &str) -> Result<ResultDocument> {
    let doc: ResultDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    if doc.format != DOCUMENT_FORMAT {
        return Err(Error::Document(format!(
            "unsupported format `{}` (expected `{DOCUMENT_FORMAT}`)",
            doc.format
        )));
    }
    doc.spectrum.check()?;
    let dev = doc
        .spectrum
        .s_linear
        .iter()
        .flatten()
        .zip(doc.spectrum.s_db.iter().flatten())
        .map(|(lin, db)| (crate::spectrum::to_db(*lin) - db).abs())
        .fold(0.0, f64::max);
    if !(dev <= 1e-9) {
        return Err(Error::Document(format!(
            "S_dB inconsistent with S_linear by {dev:.3e} dB"
        )));
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reproduction {
    pub max_abs_diff_db: f64,
    pub points: usize,
}

/// Recomputes a stored spectrum from its provenance block.
pub fn reproduce_from_json(text: &str) -> Result<Reproduction> {
    let doc = load_result_document(text)?;
    let s = &doc.spectrum;
    let fresh = quadrature_spectrum(&doc.provenance.params, &s.omega_grid, &s.theta_grid)?;
    let max_abs_diff_db = s
        .s_db
        .iter()
        .flatten()
        .zip(fresh.s_db.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Reproduction {
        max_abs_diff_db,
        points: s.len(),
    })
}

/// Axis values in file names: fixed 9 decimals with trailing zeros removed.
pub fn format_axis_value(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".into(),
        s => s.into(),
    }
}

/// `<experiment>_<axis>=<value>` without extension.
pub fn file_stem(experiment: &str, axis: SweepAxis, value: f64) -> String {
    format!("{experiment}_{axis}={}", format_axis_value(value))
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::default_theta_grid;

    #[test]
    fn csv_row_count_and_header() {
        let s = NoiseSpectrum::from_linear(vec![-0.1, 0.0, 0.1], default_theta_grid(), vec![vec![0.5, 2.0]; 3]);
        let csv = spectrum_csv(&s).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3 * 2 + 1);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "-1.00000000000e-1,5.23598775598e-1,5.00000000000e-1,-3.01029995664e0"
        );
    }

    #[test]
    fn empty_spectrum_is_rejected() {
        let s = NoiseSpectrum::from_linear(vec![], vec![0.0], vec![]);
        assert!(matches!(spectrum_csv(&s), Err(Error::EmptyResult)));
    }

    #[test]
    fn axis_value_names() {
        assert_eq!(format_axis_value(0.4 * 0.1), "0.04");
        assert_eq!(format_axis_value(-0.05), "-0.05");
        assert_eq!(format_axis_value(0.0), "0");
        assert_eq!(format_axis_value(-0.0), "0");
        assert_eq!(format_axis_value(1.0), "1");
        assert_eq!(file_stem("sweep-2b", SweepAxis::DeltaA, -0.1), "sweep-2b_delta_a=-0.1");
    }

    #[test]
    fn format_parses_from_flag_text() {
        assert_eq!("both".parse::<OutputFormat>().unwrap(), OutputFormat::Both);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
