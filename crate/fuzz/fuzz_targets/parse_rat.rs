#![no_main]

use credal_core::exactla::{format_rat, parse_rat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = parse_rat(text) {
        // The canonical form parses back to the same value.
        assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
    }
});
