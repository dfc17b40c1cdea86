//! Contextual-biasing decoding for transducer speech recognizers.
//!
//! The crate is organised bottom-up:
//!
//! * [`tokenizer`]: unigram WordPiece segmentation (Viterbi, n-best, sampling).
//! * [`fstlib`]: tropical-semiring WFST kernel.
//! * [`biasing`]: class-based pattern LM, `@name` FST and stepwise LM scoring.
//! * [`plm`]: contact prefix trie and PLM predictor embedding.
//! * [`g2g`]: grapheme-to-grapheme spelling variants.
//! * [`decoder`]: transducer beam search with shallow fusion and deep PLM input.

pub mod error;
pub mod fstlib;
pub mod biasing;
pub mod decoder;
pub mod g2g;
pub mod plm;
pub mod tokenizer;

pub use error::{Error, Result};
