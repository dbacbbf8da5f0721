//! Replays the checked-in fuzz seeds through the parsers.

use std::fs;
use std::path::Path;

use usc_squeeze::config::parse_config;
use usc_squeeze::export::load_result_document;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn config_seeds() {
    let s = seeds("parse_config");
    assert!(s.len() >= 5);
    let accepted = s.iter().filter(|(_, text)| parse_config(text).is_ok()).count();
    assert_eq!(accepted, s.len() - 1, "only the broken seed is rejected");
}

#[test]
fn result_json_seeds() {
    let s = seeds("result_json");
    let accepted: Vec<&str> = s
        .iter()
        .filter(|(_, text)| load_result_document(text).is_ok())
        .map(|(name, _)| name.as_str())
        .collect();
    assert_eq!(accepted.len(), 1, "{accepted:?}");
}
