#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenarios) = bqte::parse_scenarios(text) {
        for s in &scenarios {
            s.validate().expect("parsed scenarios are validated");
            let _ = s.grid();
        }
    }
});
