//! Transducer beam search with shallow fusion against a biasing graph and
//! optional PLM input to the joiner, plus the contact-list simulation used
//! to build training and evaluation data.

mod beam;
mod scorer;
mod simulate;

pub use beam::{beam_decode, fuse, DecodeConfig, DecodeResult, PlmContext};
pub use scorer::{log_softmax, log_sum_exp, Scorer, TableScorer, ToyJoiner, MAX_JOINER_CELLS, NORMALIZATION_TOLERANCE};
pub use simulate::{
    entity_pool, load_tagged_corpus, simulate_contact_list, SimulatedUtterance, SimulationConfig,
    TaggedUtterance,
};
