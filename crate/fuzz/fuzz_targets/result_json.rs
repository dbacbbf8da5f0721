#![no_main]

use libfuzzer_sys::fuzz_target;
use usc_squeeze::export::load_result_document;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(doc) = load_result_document(text) {
            assert!(doc.spectrum.check().is_ok());
            let _ = doc.to_json();
        }
    }
});
