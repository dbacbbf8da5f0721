#![no_main]

use libfuzzer_sys::fuzz_target;
use usc_squeeze::config::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = parse_config(text) {
            // Accepted configs satisfy the documented invariants.
            assert!(config.params.validate().is_valid());
            assert!(!config.theta_grid.is_empty());
            assert!(!config.omega_grid.is_empty());
            assert!(config.omega_grid.iter().all(|w| w.is_finite()));
        }
    }
});
