#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // parsing must never panic; round-trip what parses
        if let Ok(field) = helicoid_lab::grid::ScalarField::from_csv_str(text) {
            let again = field.to_csv_string();
            let back = helicoid_lab::grid::ScalarField::from_csv_str(&again)
                .expect("serializer output must parse");
            assert_eq!(back.values(), field.values());
        }
    }
});
