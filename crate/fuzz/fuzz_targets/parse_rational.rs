#![no_main]

use libfuzzer_sys::fuzz_target;

use darboux_core::parse::parse_param;
use darboux_core::rational::parse_rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(r) = parse_rational(text) {
        assert_eq!(parse_rational(&r.to_string()), Some(r));
    }
    let _ = parse_param(text);
});
