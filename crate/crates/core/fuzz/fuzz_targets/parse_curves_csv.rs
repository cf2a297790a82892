#![no_main]

use libfuzzer_sys::fuzz_target;
use slms_core::report::parse_curves_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_curves_csv(text) {
        assert!(rows.iter().all(|r| r.mse_db.is_finite() && !r.algorithm.is_empty()));
    }
});
