#![no_main]

use ctxbias::biasing::{build_pattern_lm, PatternCorpus};
use ctxbias::fstlib::SymbolTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 2048 {
        return;
    }
    if let Ok(corpus) = PatternCorpus::load(data) {
        let mut words = SymbolTable::new();
        let _ = build_pattern_lm(&corpus, 3, &mut words);
    }
});
