#![no_main]

use libfuzzer_sys::fuzz_target;
use slms_core::filter::AlgorithmId;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(id) = text.parse::<AlgorithmId>() {
        assert_eq!(id.to_string(), text);
    }
});
