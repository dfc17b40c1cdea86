#![no_main]

use ctxbias::tokenizer::Vocabulary;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(vocab) = Vocabulary::load(data) {
        for (id, piece, lp) in vocab.iter() {
            assert_eq!(vocab.id(piece), Some(id));
            assert!(lp.is_finite());
        }
    }
});
