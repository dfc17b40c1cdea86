#![no_main]

use std::path::Path;

use ctxbias_cli::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config(text, Path::new(".")) {
        assert!(config.beam >= 1);
        assert!((0.0..=1.0).contains(&config.p));
    }
});
