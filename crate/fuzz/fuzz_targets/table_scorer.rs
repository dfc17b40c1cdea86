#![no_main]

use ctxbias::decoder::{Scorer, TableScorer};
use ctxbias::tokenizer::Vocabulary;
use libfuzzer_sys::fuzz_target;

const PIECES: &str = "_call\t-2\n_John\t-3\n_Jo\t-3\nn\t-2\n_K\t-3\naity\t-4\n_Katie\t-5\na\t-6\ni\t-6\nt\t-6\ny\t-6\n";

fuzz_target!(|data: &[u8]| {
    let vocab = Vocabulary::load(PIECES.as_bytes()).unwrap();
    if let Ok(scorer) = TableScorer::load(data, &vocab) {
        for t in 0..scorer.num_frames().min(8) {
            if let Ok(row) = scorer.log_probs(t, &[], None) {
                assert_eq!(row.len(), vocab.len() + 1);
            }
        }
    }
});
