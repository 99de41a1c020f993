#![no_main]

use divfilt::picard::{curve_from_json, qn_sequence};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(input) = curve_from_json(s) {
        let c = &input.curve;
        assert!(c.contains(&input.p) && c.contains(&input.q));
        for pt in qn_sequence(c, &input.p, &input.q, 4) {
            assert!(c.contains(&pt));
        }
    }
});
