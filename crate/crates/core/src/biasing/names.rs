use super::corpus::ContactList;
use super::piece_label;
use crate::error::{Error, Result};
use crate::fstlib::{determinize, minimize, rmepsilon, Arc, SymbolTable, Wfst, EPS, PHI};
use crate::tokenizer::{phrase_pieces, Vocabulary};

/// Builds the `@name` class FST: one WordPiece chain per spelling (G2G
/// variants included) emitting the display form on its last arc, plus an
/// OOV region entered by a PHI arc from the start and looping on PHI, each
/// step costing `oov_weight`. The result is epsilon-free, determinized over
/// label pairs and minimized.
pub fn build_name_fst(
    contacts: &ContactList,
    vocab: &Vocabulary,
    oov_weight: f64,
    words: &mut SymbolTable,
) -> Result<Wfst> {
    if contacts.is_empty() {
        return Err(Error::EmptyContactList);
    }
    if !(oov_weight >= 0.0 && oov_weight.is_finite()) {
        return Err(Error::InvalidArgument(format!("oov weight {oov_weight} must be finite and >= 0")));
    }
    let mut fst = Wfst::new();
    let start = fst.add_state();
    fst.set_start(start);
    for (contact, spelling) in contacts.spellings() {
        let pieces = phrase_pieces(spelling, vocab)?;
        let display = words.add(&contact.display);
        let mut from = start;
        for (i, &p) in pieces.iter().enumerate() {
            let to = fst.add_state();
            let olabel = if i + 1 == pieces.len() { display } else { EPS };
            fst.add_arc(from, Arc::new(piece_label(p), olabel, 0.0, to));
            from = to;
        }
        fst.set_final(from, 0.0);
    }
    let oov = fst.add_state();
    fst.set_final(oov, 0.0);
    fst.add_arc(start, Arc::new(PHI, EPS, oov_weight, oov));
    fst.add_arc(oov, Arc::new(PHI, EPS, oov_weight, oov));

    let fst = minimize(&determinize(&rmepsilon(&fst)?)?)?;
    let mut fst = fst;
    fst.sort_arcs();
    Ok(fst)
}
