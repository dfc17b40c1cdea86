//! Unigram WordPiece segmentation: Viterbi, exact n-best and smoothed
//! sampling for sub-word regularization.

mod lattice;
mod vocab;

pub use lattice::{best_parse, nbest_parses, sample_parse, Segmentation};
pub use vocab::{PieceId, Vocabulary, DEFAULT_MARKER};

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Best,
    Sampled { l: usize, alpha: f64 },
}

/// Segments each whitespace-separated word of `text` (marker-prefixed) and
/// concatenates the pieces.
pub fn tokenize_sentence<R: Rng + ?Sized>(
    text: &str,
    vocab: &Vocabulary,
    mode: Mode,
    rng: &mut R,
) -> Result<Vec<PieceId>> {
    let mut out = Vec::new();
    for (index, word) in text.split_whitespace().enumerate() {
        let wrap = |source| Error::Word {
            index,
            source: Box::new(source),
        };
        let marked = vocab.mark(word).map_err(wrap)?;
        let seg = match mode {
            Mode::Best => best_parse(&marked, vocab),
            Mode::Sampled { l, alpha } => sample_parse(&marked, vocab, l, alpha, rng),
        }
        .map_err(wrap)?;
        out.extend(seg.pieces);
    }
    Ok(out)
}

/// Best parse of a single marker-prefixed word.
pub fn word_pieces(word: &str, vocab: &Vocabulary) -> Result<Vec<PieceId>> {
    Ok(best_parse(&vocab.mark(word)?, vocab)?.pieces)
}

/// Best-parse pieces for a whitespace-separated word sequence.
pub fn phrase_pieces(phrase: &str, vocab: &Vocabulary) -> Result<Vec<PieceId>> {
    let mut out = Vec::new();
    for word in phrase.split_whitespace() {
        out.extend(word_pieces(word, vocab)?);
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("empty phrase".into()));
    }
    Ok(out)
}
