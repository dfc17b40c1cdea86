#![no_main]

use ctxbias::decoder::{entity_pool, load_tagged_corpus};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(corpus) = load_tagged_corpus(data) {
        let pool = entity_pool(&corpus);
        assert!(pool.len() <= corpus.len());
    }
});
