#![no_main]

use ctxbias::decoder::{Scorer, ToyJoiner};
use ctxbias::tokenizer::Vocabulary;
use libfuzzer_sys::fuzz_target;

const PIECES: &str = "_call\t-2\n_John\t-3\n_Jo\t-3\nn\t-2\n_K\t-3\naity\t-4\n_Katie\t-5\na\t-6\ni\t-6\nt\t-6\ny\t-6\n";

fuzz_target!(|data: &[u8]| {
    let vocab = Vocabulary::load(PIECES.as_bytes()).unwrap();
    if let Ok(joiner) = ToyJoiner::load(data, &vocab) {
        for t in 0..joiner.num_frames().min(4) {
            let _ = joiner.log_probs(t, &[0, 1], None);
        }
    }
});
