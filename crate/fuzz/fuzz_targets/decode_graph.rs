#![no_main]

use libfuzzer_sys::fuzz_target;
use relprop::io;

fuzz_target!(|data: &[u8]| {
    if let Ok(graph) = io::decode_graph(data) {
        assert_eq!(io::encode_graph(&graph), data);
    }
});
