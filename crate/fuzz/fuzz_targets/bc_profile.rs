#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(profile) = helicoid_lab::config::parse_bc(text) {
            let v = profile.eval(2.0, 0.5, 1.0);
            assert!(!v.is_nan() || text.contains("nan") || text.contains("NaN"));
        }
    }
});
