#![no_main]

use libfuzzer_sys::fuzz_target;
use symsq::bitdomain::{devectorize, vectorize, BitString};

fuzz_target!(|data: (u8, u64)| {
    let (width, value) = data;
    let Ok(x) = BitString::new(usize::from(width), value) else {
        return;
    };
    if let Ok(a) = devectorize(x) {
        assert_eq!(vectorize(&a), x);
    }
});
