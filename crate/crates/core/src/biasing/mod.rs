//! Class-based biasing graph: a word-level pattern LM whose `@name` arcs are
//! replaced by a WordPiece-level FST built from the user's contacts.

mod corpus;
mod expand;
mod lm;
mod names;
mod ngram;
mod replace;

pub use corpus::{Contact, ContactList, PatternCorpus, CLASS_TAG};
pub use expand::expand_word_arcs;
pub use lm::{lm_advance, lm_start, LmState};
pub use names::build_name_fst;
pub use ngram::build_pattern_lm;
pub use replace::replace_class_tag;

use crate::error::{Error, Result};
use crate::fstlib::{Label, SymbolTable, Wfst, EPS, PHI};
use crate::g2g::G2GMap;
use crate::tokenizer::{PieceId, Vocabulary};

/// Graph input label of a vocabulary piece.
pub fn piece_label(id: PieceId) -> Label {
    id + 2
}

/// Vocabulary id behind a graph input label, `None` for EPS, PHI and the
/// class label.
pub fn label_piece(label: Label, vocab: &Vocabulary) -> Option<PieceId> {
    let id = label.checked_sub(2)?;
    ((id as usize) < vocab.len()).then_some(id)
}

/// Input label used for `@name` arcs before class replacement.
pub fn class_label(vocab: &Vocabulary) -> Label {
    vocab.len() as Label + 2
}

/// Input symbol table of a biasing graph: EPS, PHI, the pieces in id order
/// and finally `@name`.
pub fn input_symbols(vocab: &Vocabulary) -> Result<SymbolTable> {
    let mut table = SymbolTable::new();
    for (id, piece, _) in vocab.iter() {
        if table.find(piece).is_some() {
            return Err(Error::ReservedSymbol(piece_label(id)));
        }
        let l = table.add(piece);
        debug_assert_eq!(l, piece_label(id));
    }
    if table.find(CLASS_TAG).is_some() {
        return Err(Error::ReservedSymbol(class_label(vocab)));
    }
    table.add(CLASS_TAG);
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphConfig {
    pub order: usize,
    pub oov_weight: f64,
    /// G2G variants added per word of each spelling.
    pub k_g2g: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            order: 4,
            oov_weight: 6.0,
            k_g2g: 2,
        }
    }
}

/// A composed biasing graph with the table naming its output labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasingGraph {
    pub fst: Wfst,
    pub words: SymbolTable,
}

impl BiasingGraph {
    /// Words emitted along a path, EPS skipped.
    pub fn words_of(&self, olabels: &[Label]) -> Vec<String> {
        olabels
            .iter()
            .filter(|&&l| l != EPS && l != PHI)
            .filter_map(|&l| self.words.symbol(l).map(str::to_string))
            .collect()
    }

    /// AT&T text with piece and word symbols in place of numeric labels.
    pub fn to_text(&self, vocab: &Vocabulary) -> Result<String> {
        self.fst.to_text_with_symbols(&input_symbols(vocab)?, &self.words)
    }

    pub fn from_text(text: &str, vocab: &Vocabulary) -> Result<Self> {
        let mut words = SymbolTable::new();
        let fst = Wfst::from_text_with_symbols(text, &input_symbols(vocab)?, &mut words)?;
        fst.validate()?;
        if fst.start().is_none() {
            return Err(Error::EmptyGraph);
        }
        Ok(Self { fst, words })
    }
}

/// Pattern LM, WordPiece expansion, name FST (with G2G variants when a map
/// is given) and class replacement in one go.
pub fn build_biasing_graph(
    corpus: &PatternCorpus,
    contacts: &ContactList,
    vocab: &Vocabulary,
    g2g: Option<&G2GMap>,
    config: &GraphConfig,
) -> Result<BiasingGraph> {
    let mut words = SymbolTable::new();
    let lm = build_pattern_lm(corpus, config.order, &mut words)?;
    let lm = expand_word_arcs(&lm, &words, vocab)?;
    let expanded;
    let contacts = match g2g {
        Some(map) => {
            expanded = contacts.expand_g2g(map, config.k_g2g);
            &expanded
        }
        None => contacts,
    };
    let names = build_name_fst(contacts, vocab, config.oov_weight, &mut words)?;
    let fst = replace_class_tag(&lm, &names, class_label(vocab));
    Ok(BiasingGraph { fst, words })
}
