#![no_main]

use libfuzzer_sys::fuzz_target;

// The config parser must reject malformed input with an error, never a
// panic, and accepted configs must round-trip through their canonical
// rendering.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = comp_cache::config::parse_config_str(text) {
            let canonical = config.canonical_string();
            let reparsed = comp_cache::config::parse_config_str(&canonical)
                .expect("canonical rendering must parse");
            assert_eq!(reparsed, config);
            let _ = config.hash();
            let _ = config.validation_report();
        }
    }
});
