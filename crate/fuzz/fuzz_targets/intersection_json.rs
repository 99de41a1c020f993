#![no_main]

use divfilt::intersection::IntersectionForm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(form) = IntersectionForm::from_json(s) {
        assert_eq!(IntersectionForm::from_json(&form.to_json()).unwrap(), form);
    }
});
