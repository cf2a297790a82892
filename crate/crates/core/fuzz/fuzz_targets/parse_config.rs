#![no_main]

use libfuzzer_sys::fuzz_target;
use slms_core::config::{parse_config_str, to_config_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config_str(text) {
        config.validate().expect("parser returned an invalid config");
        // Whatever parses must survive a round trip unchanged.
        let again = parse_config_str(&to_config_string(&config)).expect("echoed config failed to parse");
        assert_eq!(again, config);
    }
});
