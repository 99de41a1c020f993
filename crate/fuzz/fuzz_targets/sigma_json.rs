#![no_main]

use divfilt::monomial::{build_in, SigmaFiltration};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = SigmaFiltration::from_json(s) {
        // Generator counts grow with sigma, so only build small ideals.
        for n in 1..=f.len().min(8) {
            if f.sigma(n).unwrap() <= 4096 {
                let ideal = build_in(&f, n).unwrap();
                assert_eq!(ideal.min_gens_count() as u64, f.sigma(n).unwrap() + 2);
            }
        }
    }
});
