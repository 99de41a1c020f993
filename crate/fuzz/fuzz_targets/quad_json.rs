#![no_main]

use divfilt::quadfield::quad_from_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = quad_from_json(s) {
        let back = serde_json::to_string(&x).unwrap();
        assert_eq!(quad_from_json(&back).unwrap(), x);
        let _ = x.floor();
        let _ = x.sign();
    }
});
