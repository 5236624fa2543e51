#![no_main]

use libfuzzer_sys::fuzz_target;
use relprop::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ranking) = io::parse_ranking(text) {
        let again = io::parse_ranking(&io::write_ranking(&ranking)).unwrap();
        assert_eq!(again.len(), ranking.len());
        for ((a, x), (b, y)) in ranking.iter().zip(&again) {
            assert_eq!(a, b);
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
});
