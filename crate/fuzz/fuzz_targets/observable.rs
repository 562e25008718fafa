#![no_main]

use libfuzzer_sys::fuzz_target;
use symsq::formats::parse_observable;
use symsq::quantum::observable::NORM_TOL;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(obs) = parse_observable(text) {
        assert!(obs.operator_norm() <= 1.0 + NORM_TOL);
    }
});
