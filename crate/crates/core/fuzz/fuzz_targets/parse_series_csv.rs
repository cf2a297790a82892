#![no_main]

use libfuzzer_sys::fuzz_target;
use slms_core::report::{parse_series_csv, series_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_series_csv(text) {
        assert_eq!(parse_series_csv(&series_to_csv(&values)).unwrap(), values);
    }
});
