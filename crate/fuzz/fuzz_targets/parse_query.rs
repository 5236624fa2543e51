#![no_main]

use libfuzzer_sys::fuzz_target;
use relprop::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(counts) = io::parse_query(text) {
        assert_eq!(io::parse_query(&io::write_query(&counts)).unwrap(), counts);
    }
});
