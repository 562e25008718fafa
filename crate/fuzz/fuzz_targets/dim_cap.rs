#![no_main]

use libfuzzer_sys::fuzz_target;
use symsq::quantum::parse_dim_cap;

fuzz_target!(|data: &str| {
    if let Ok(cap) = parse_dim_cap(data) {
        assert!(cap.is_power_of_two());
    }
});
