use std::fs;

use usc_squeeze::config::parse_config;
use usc_squeeze::experiments::{squeezing_summary, SweepAxis};
use usc_squeeze::export::{
    file_stem, load_result_document, reproduce_from_json, spectrum_csv, write_file, Provenance, ResultDocument,
};
use usc_squeeze::freq::quadrature_spectrum;
use usc_squeeze::model::{polariton_frequencies, stability_check};
use usc_squeeze::params::SystemParams;
use usc_squeeze::runner::{run, RunStatus};
use usc_squeeze::spectrum::{default_omega_grid, default_theta_grid};
use usc_squeeze::Error;

fn document(p: &SystemParams) -> ResultDocument {
    let s = quadrature_spectrum(p, &default_omega_grid(p.w), &default_theta_grid()).unwrap();
    let b = polariton_frequencies(p);
    let st = stability_check(p);
    let sum = squeezing_summary(&s, &b, &st).unwrap();
    ResultDocument::new(
        "spectrum",
        Provenance::new(p).with_axis(SweepAxis::Gmod, p.gmod),
        st,
        b,
        sum,
        s,
    )
}

#[test]
fn json_reproduces_spectrum() {
    let json = document(&SystemParams::reference(0.04)).to_json().unwrap();
    let r = reproduce_from_json(&json).unwrap();
    assert_eq!(r.points, 2001 * 2);
    assert!(r.max_abs_diff_db <= 1e-12);
    let doc = load_result_document(&json).unwrap();
    assert_eq!(doc.provenance.params, SystemParams::reference(0.04));
}

#[test]
fn exports_are_byte_deterministic() {
    let p = SystemParams::reference(0.01);
    let (a, b) = (document(&p), document(&p));
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(spectrum_csv(&a.spectrum).unwrap(), spectrum_csv(&b.spectrum).unwrap());
}

#[test]
fn malformed_documents_are_rejected() {
    assert!(matches!(load_result_document("{}"), Err(Error::Document(_))));
    assert!(matches!(load_result_document("not json"), Err(Error::Document(_))));
    let json = document(&SystemParams::reference(0.01)).to_json().unwrap();
    let wrong = json.replace("usc-squeeze.spectrum.v1", "other.v9");
    assert!(matches!(load_result_document(&wrong), Err(Error::Document(_))));
    let mut doc = document(&SystemParams::reference(0.01));
    doc.spectrum.s_db[0][0] += 1.0;
    let tampered = serde_json::to_string(&doc).unwrap();
    assert!(matches!(load_result_document(&tampered), Err(Error::Document(_))));
}

#[test]
fn io_errors_carry_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out.csv");
    match write_file(&target, "data") {
        Err(Error::Io { path, .. }) => assert!(path.starts_with(&blocker)),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn file_names_follow_the_schema() {
    assert_eq!(file_stem("sweep-2a", SweepAxis::Gmod, 0.4 * 0.1), "sweep-2a_Gmod=0.04");
    assert_eq!(file_stem("sweep-2b", SweepAxis::DeltaA, 0.0), "sweep-2b_delta_a=0");
    assert_eq!(file_stem("x", SweepAxis::OmegaG, 0.85), "x_omega_G=0.85");
}

#[test]
fn runner_writes_requested_formats() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "experiment = \"sweep-2a\"\n[params]\nW = 0.1\nomega_G = 0.9\nGmod = 0.04\ngamma_a = 0.1\ngamma_P = 0.0033333333333333335\n[grid]\nomega_points = 3\n[output]\ndir = {:?}\nformat = \"both\"\n",
        dir.path()
    );
    let config = parse_config(&text).unwrap();
    let mut log = Vec::new();
    let out = run(&config, &mut |m| log.push(m.to_string())).unwrap();
    assert_eq!(out.status, RunStatus::Success);
    assert_eq!(out.files.len(), 7);
    let csv = fs::read_to_string(dir.path().join("sweep-2a_Gmod=0.04.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3 * 2 + 1);
    assert!(out.summary.starts_with("experiment=sweep-2a status=ok"));
    assert!(!out.summary.contains('\n'));
    assert!(!log.is_empty());
}

#[test]
fn runner_reports_unstable_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "experiment = \"sweep-2b\"\n[params]\nW = 0.1\nomega_G = 0.9\nGmod = 0.05\ngamma_a = 0.1\ngamma_P = 0.0033333333333333335\n[grid]\nomega_points = 5\n[output]\ndir = {:?}\n",
        dir.path()
    );
    let out = run(&parse_config(&text).unwrap(), &mut |_| {}).unwrap();
    assert!(matches!(out.status, RunStatus::Unstable { max_real_part } if max_real_part > 0.0));
    assert!(dir.path().join("sweep-2b_delta_a=0.1.csv").exists());
    assert!(!dir.path().join("sweep-2b_delta_a=-0.1.csv").exists());
}
