#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    // first byte picks the vertex count the sidecar is checked against
    let vertex_count = data[0] as usize;
    if let Ok(text) = std::str::from_utf8(&data[1..]) {
        let _ = helicoid_lab::meshcheck::parse_theta_csv(text, vertex_count);
    }
});
