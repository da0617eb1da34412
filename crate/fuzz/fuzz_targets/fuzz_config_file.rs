//! Fuzz the CLI config-file parser: must never panic, and parsed pairs must
//! be stable under re-serialization.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(pairs) = permspec_cli::parse_config_text(text) else { return };
    let rendered: String = pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    let again = permspec_cli::parse_config_text(&rendered).expect("rendered config parses");
    assert_eq!(pairs, again);
});
