#![no_main]

use libfuzzer_sys::fuzz_target;
use symsq::formats::{load_partition_action, parse_partition};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = parse_partition(text) {
        assert!(spec.blocks.iter().flatten().all(|&x| x < spec.domain_size));
    }
    // Large but valid domains are legitimate; keep iterations fast.
    if text.len() < 4096 {
        let _ = load_partition_action(text);
    }
});
