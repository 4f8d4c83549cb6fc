#![no_main]

use std::collections::HashMap;

use libfuzzer_sys::fuzz_target;

use darboux_core::parse::parse_poly;
use darboux_core::poly::Vars;
use darboux_core::rational::frac;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut params = HashMap::new();
    params.insert("p".to_string(), frac(-3, 2));
    if let Ok(f) = parse_poly(text, Vars::XY, &params) {
        // rendering parses back to the same polynomial
        let again = parse_poly(&f.render(), Vars::XY, &params).expect("rendered polynomial parses");
        assert_eq!(again, f);
    }
});
