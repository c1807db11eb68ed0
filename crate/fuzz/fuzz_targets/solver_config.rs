#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = helicoid_lab::config::SolverRunConfig::parse_str(text) {
            // grid construction validates the numeric ranges, never panics
            let _ = cfg.grid();
        }
    }
});
