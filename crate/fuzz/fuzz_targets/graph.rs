#![no_main]

use ctxbias::biasing::{lm_advance, lm_start, piece_label, BiasingGraph};
use ctxbias::tokenizer::Vocabulary;
use libfuzzer_sys::fuzz_target;

const PIECES: &str = "_call\t-2\n_John\t-3\n_Jo\t-3\nn\t-2\n_K\t-3\naity\t-4\n_Katie\t-5\na\t-6\ni\t-6\nt\t-6\ny\t-6\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let vocab = Vocabulary::load(PIECES.as_bytes()).unwrap();
    let Ok(graph) = BiasingGraph::from_text(text, &vocab) else { return };
    let Ok(mut state) = lm_start(&graph.fst) else { return };
    for p in [0, 4, 5, 1, 3] {
        state = lm_advance(&graph.fst, &state, piece_label(p)).expect("piece labels are not reserved");
        let _ = graph.words_of(state.output());
    }
});
