#![no_main]

use ctxbias::tokenizer::{tokenize_sentence, Mode, Vocabulary};
use libfuzzer_sys::fuzz_target;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PIECES: &str = "_call\t-2\n_John\t-3\n_Jo\t-3\nn\t-2\n_K\t-3\naity\t-4\n_Katie\t-5\na\t-6\ni\t-6\nt\t-6\ny\t-6\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 256 {
        return;
    }
    let vocab = Vocabulary::load(PIECES.as_bytes()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    if let Ok(best) = tokenize_sentence(text, &vocab, Mode::Best, &mut rng) {
        assert_eq!(vocab.detokenize(&best), text.split_whitespace().collect::<Vec<_>>().join(" "));
        let sampled = tokenize_sentence(text, &vocab, Mode::Sampled { l: 4, alpha: 0.5 }, &mut rng)
            .expect("segmentable text samples");
        assert_eq!(vocab.detokenize(&sampled), vocab.detokenize(&best));
    }
});
