#![no_main]

use credal_core::io::parse_model;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = parse_model(text) {
        let lp = model.to_lower_prevision();
        assert_eq!(lp.dim(), model.space().len());
    }
});
