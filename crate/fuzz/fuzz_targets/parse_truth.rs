#![no_main]

use libfuzzer_sys::fuzz_target;
use relprop::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(truths) = io::parse_truth(text) {
        assert_eq!(io::parse_truth(&io::write_truth(truths.values())).unwrap(), truths);
    }
});
