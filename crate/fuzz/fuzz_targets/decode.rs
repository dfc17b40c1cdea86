#![no_main]

use ctxbias::decoder::{beam_decode, DecodeConfig, TableScorer};
use ctxbias::tokenizer::Vocabulary;
use libfuzzer_sys::fuzz_target;

const PIECES: &str = "_call\t-2\n_John\t-3\n_Jo\t-3\nn\t-2\n_K\t-3\naity\t-4\n_Katie\t-5\na\t-6\ni\t-6\nt\t-6\ny\t-6\n";

fuzz_target!(|data: &[u8]| {
    let vocab = Vocabulary::load(PIECES.as_bytes()).unwrap();
    let Ok(scorer) = TableScorer::load(data, &vocab) else { return };
    let config = DecodeConfig { beam: 4, lambda: 1.0, max_symbols: 2, plm: false, nbest: 4 };
    if let Ok(hyps) = beam_decode(&scorer, None, None, &config) {
        assert!(hyps.len() <= 4);
        assert!(hyps.windows(2).all(|w| w[0].score >= w[1].score));
    }
});
