#![no_main]

use libfuzzer_sys::fuzz_target;
use relprop::{build_graph, io, KernelParams};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(records) = io::parse_matches(text) else { return };
    let reparsed = io::parse_matches(&io::write_matches(&records)).expect("written matches parse");
    assert_eq!(records, reparsed);
    if let Ok(graph) = build_graph(&records, &KernelParams::default()) {
        let decoded = io::decode_graph(&io::encode_graph(&graph)).expect("encoded graph decodes");
        assert_eq!(graph, decoded);
    }
});
