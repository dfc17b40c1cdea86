use std::collections::HashMap;

use super::{Arc, Label, PairEncoder, StateId, Wfst};
use crate::error::{Error, Result};

/// Tropical shortest distance from each state to a final state.
fn distance_to_final(fst: &Wfst) -> Result<Vec<Option<f64>>> {
    let n = fst.num_states();
    let mut dist: Vec<Option<f64>> = fst.states().map(|s| fst.final_weight(s)).collect();
    for _ in 0..=n {
        let mut changed = false;
        for s in fst.states() {
            for a in fst.arcs(s) {
                let Some(d) = dist[a.next] else { continue };
                let cand = a.weight + d;
                if dist[s].is_none_or(|cur| cand < cur) {
                    dist[s] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(dist);
        }
    }
    Err(Error::InvalidFst("negative-weight cycle".into()))
}

/// Tropical weight pushing toward the start state. The start state's
/// potential stays 0 so the weighted language is unchanged without an
/// initial weight. Non-coaccessible states are trimmed first.
pub fn push_weights(fst: &Wfst) -> Result<Wfst> {
    fst.validate()?;
    let mut out = fst.connect();
    let dist = distance_to_final(&out)?;
    let Some(start) = out.start() else {
        return Ok(out);
    };
    let potential = |s: StateId| {
        if s == start {
            0.0
        } else {
            dist[s].expect("connected states reach a final state")
        }
    };
    for s in out.states() {
        let ps = potential(s);
        for a in out.arcs_mut(s) {
            a.weight = a.weight + potential(a.next) - ps;
        }
        if let Some(f) = out.final_weight(s) {
            out.set_final(s, f - ps);
        }
    }
    Ok(out)
}

#[derive(Hash, PartialEq, Eq)]
struct Signature {
    class: usize,
    final_bits: Option<u64>,
    arcs: Vec<(Label, u64, usize)>,
}

fn bits(w: f64) -> u64 {
    (w + 0.0).to_bits()
}

/// Weight pushing followed by Moore partition refinement on
/// (label pair, pushed weight, target class) signatures. Input must be
/// deterministic in the (ilabel, olabel) pair alphabet, which is what
/// [`determinize`](super::determinize) produces.
pub fn minimize(fst: &Wfst) -> Result<Wfst> {
    fst.validate()?;
    let mut encoder = PairEncoder::default();
    let encoded = encoder.encode(fst);
    if let Some(s) = encoded.first_nondeterministic_state() {
        return Err(Error::NonDeterministic(s));
    }
    let pushed = push_weights(&encoded)?;
    let Some(start) = pushed.start() else {
        return Ok(Wfst::new());
    };

    let n = pushed.num_states();
    let mut class = vec![0usize; n];
    let mut count = 0;
    loop {
        let mut ids: HashMap<Signature, usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in pushed.states() {
            let mut arcs: Vec<(Label, u64, usize)> = pushed
                .arcs(s)
                .iter()
                .map(|a| (a.ilabel, bits(a.weight), class[a.next]))
                .collect();
            arcs.sort_unstable();
            let sig = Signature {
                class: class[s],
                final_bits: pushed.final_weight(s).map(bits),
                arcs,
            };
            let fresh = ids.len();
            next[s] = *ids.entry(sig).or_insert(fresh);
        }
        let stable = ids.len() == count;
        count = ids.len();
        class = next;
        if stable {
            break;
        }
    }

    let mut out = Wfst::new();
    out.add_states(count);
    let mut done = vec![false; count];
    for s in pushed.states() {
        let c = class[s];
        if std::mem::replace(&mut done[c], true) {
            continue;
        }
        if let Some(f) = pushed.final_weight(s) {
            out.set_final(c, f);
        }
        for a in pushed.arcs(s) {
            out.add_arc(
                c,
                Arc {
                    next: class[a.next],
                    ..*a
                },
            );
        }
    }
    out.set_start(class[start]);
    Ok(encoder.decode(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fstlib::{determinize, enumerate_language, PhiExpansion};

    fn lang(f: &Wfst) -> crate::fstlib::Language {
        enumerate_language(f, 8, PhiExpansion::Opaque)
    }

    #[test]
    fn identical_suffixes_merge() {
        // a b c | d b c with the same weights: the two "b c" branches merge.
        let f = Wfst::from_text(
            "0\t1\t2\t2\t1\n1\t2\t3\t3\t1\n2\t3\t4\t4\t1\n0\t4\t5\t5\t1\n4\t5\t3\t3\t1\n5\t6\t4\t4\t1\n3\n6\n",
        )
        .unwrap();
        let m = minimize(&f).unwrap();
        assert_eq!(m.num_states(), 4);
        assert_eq!(lang(&m), lang(&f));
    }

    #[test]
    fn weights_pushed_before_comparison() {
        // Suffix branches differ only in where the weight sits.
        let f = Wfst::from_text(
            "0\t1\t2\t2\t0\n1\t2\t3\t3\t2\n0\t3\t4\t4\t2\n3\t4\t3\t3\t0\n2\n4\n",
        )
        .unwrap();
        let m = minimize(&f).unwrap();
        assert_eq!(m.num_states(), 3);
        assert_eq!(lang(&m), lang(&f));
    }

    #[test]
    fn minimal_input_unchanged_in_size() {
        let chain = Wfst::from_text("0\t1\t2\t2\t1\n1\t2\t3\t3\t1\n2\t3\t4\t4\t1\n3\n").unwrap();
        let m = minimize(&chain).unwrap();
        assert_eq!(m.num_states(), 4);
        assert_eq!(minimize(&m).unwrap().num_states(), 4);
        assert_eq!(lang(&m), lang(&chain));
    }

    #[test]
    fn nondeterministic_rejected() {
        let f = Wfst::from_text("0\t1\t2\t2\t1\n0\t2\t2\t2\t1\n1\n2\n").unwrap();
        assert!(matches!(minimize(&f), Err(Error::NonDeterministic(0))));
        let d = determinize(&f).unwrap();
        assert!(minimize(&d).is_ok());
    }

    #[test]
    fn cyclic_minimization() {
        // (ab)* written with an unrolled copy
        let f = Wfst::from_text("0\t1\t2\t2\t1\n1\t2\t3\t3\t1\n2\t3\t2\t2\t1\n3\t0\t3\t3\t1\n0\n2\n").unwrap();
        let m = minimize(&f).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(lang(&m), lang(&f));
    }

    #[test]
    fn pushing_preserves_language() {
        let f = Wfst::from_text("0\t1\t2\t2\t1\n0\t2\t3\t3\t4\n1\t3\t4\t4\t2\n2\t3\t4\t4\t0.5\n3\t0.25\n").unwrap();
        assert_eq!(lang(&push_weights(&f).unwrap()), lang(&f));
    }
}
