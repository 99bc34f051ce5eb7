#![no_main]

use libfuzzer_sys::fuzz_target;

// `--set key=value` overrides go through the same assignment path as config
// lines; arbitrary input must never panic, and a config that survives an
// override plus validation must still round-trip.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut config = comp_cache::SystemConfig::default();
        if config.apply_override(text).is_ok() && config.validate().is_ok() {
            let reparsed = comp_cache::config::parse_config_str(&config.canonical_string())
                .expect("canonical rendering must parse");
            assert_eq!(reparsed, config);
        }
    }
});
