//! Fuzz the FunctionSpec text parser: must never panic, and accepted specs
//! must round-trip through their canonical display form and evaluate safely.

#![no_main]

use libfuzzer_sys::fuzz_target;
use permspec::funcs::FunctionSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = FunctionSpec::parse(text) else { return };
    let again = FunctionSpec::parse(&spec.to_string()).expect("canonical form parses");
    assert_eq!(spec, again, "display/parse round trip");
    let v = spec.evaluate(0.37);
    assert!(v.is_finite());
    assert!(spec.integral().is_finite());
});
