#![no_main]

use libfuzzer_sys::fuzz_target;
use symsq::bitdomain::walsh_spectrum;

fuzz_target!(|data: &[u8]| {
    let table: Vec<bool> = data.iter().map(|b| b & 1 == 1).collect();
    if let Ok(spectrum) = walsh_spectrum(&table) {
        // Parseval: the squared coefficients of a ±1 function sum to one.
        let mass: f64 = spectrum.iter().map(|c| c * c).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }
});
