use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::{class_label, piece_label, CLASS_TAG};
use crate::error::{Error, Result};
use crate::fstlib::{Arc, Label, SymbolTable, Wfst, EPS};
use crate::tokenizer::{word_pieces, Vocabulary};

/// Replaces every word arc by a chain of WordPiece arcs. Each piece arc
/// repeats the word arc's weight; the word olabel sits on the last piece.
/// `@name` arcs are relabelled to the class input label and EPS arcs are
/// kept as they are.
pub fn expand_word_arcs(word_fst: &Wfst, words: &SymbolTable, vocab: &Vocabulary) -> Result<Wfst> {
    word_fst.validate()?;
    let class_word = words.find(CLASS_TAG);
    let mut cache: HashMap<Label, Vec<Label>> = HashMap::new();

    let mut out = Wfst::new();
    out.add_states(word_fst.num_states());
    if let Some(s) = word_fst.start() {
        out.set_start(s);
    }
    for s in word_fst.states() {
        if let Some(w) = word_fst.final_weight(s) {
            out.set_final(s, w);
        }
        for a in word_fst.arcs(s) {
            if a.ilabel == EPS {
                out.add_arc(s, *a);
                continue;
            }
            if Some(a.ilabel) == class_word {
                out.add_arc(s, Arc::new(class_label(vocab), a.olabel, a.weight, a.next));
                continue;
            }
            let pieces = match cache.entry(a.ilabel) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => {
                    let word = words
                        .symbol(a.ilabel)
                        .ok_or_else(|| Error::InvalidFst(format!("word label {} has no symbol", a.ilabel)))?;
                    let pieces = word_pieces(word, vocab)?;
                    e.insert(pieces.into_iter().map(piece_label).collect::<Vec<_>>())
                }
            };
            let mut from = s;
            for (i, &p) in pieces.iter().enumerate() {
                let last = i + 1 == pieces.len();
                let to = if last { a.next } else { out.add_state() };
                let olabel = if last { a.olabel } else { EPS };
                out.add_arc(from, Arc::new(p, olabel, a.weight, to));
                from = to;
            }
        }
    }
    Ok(out)
}
