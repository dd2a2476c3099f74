#![no_main]

use credal_core::credal::OutcomeSpace;
use credal_core::io::parse_gamble;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let space = OutcomeSpace::new(["a", "b", "c"]).unwrap();
    if let Ok(f) = parse_gamble(text, &space) {
        assert_eq!(f.len(), 3);
    }
});
