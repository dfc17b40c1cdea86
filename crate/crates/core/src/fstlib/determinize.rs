use std::collections::{BTreeMap, HashMap};

use super::{Arc, Label, PairEncoder, StateId, Wfst};
use crate::error::{Error, Result};

pub const DEFAULT_DETERMINIZE_LIMIT: usize = 1 << 20;

/// Weighted subset element: original state plus residual cost.
type Subset = Vec<(StateId, f64)>;
type SubsetKey = Vec<(StateId, u64)>;

fn key(subset: &Subset) -> SubsetKey {
    // + 0.0 folds -0.0 into 0.0
    subset.iter().map(|&(q, r)| (q, (r + 0.0).to_bits())).collect()
}

/// Weighted subset construction. Transducers are handled by determinizing
/// the acceptor over encoded (ilabel, olabel) pairs, so the result is
/// deterministic in the pair alphabet. PHI is treated like any other label.
pub fn determinize(fst: &Wfst) -> Result<Wfst> {
    determinize_with_limit(fst, DEFAULT_DETERMINIZE_LIMIT)
}

pub fn determinize_with_limit(fst: &Wfst, max_states: usize) -> Result<Wfst> {
    fst.validate()?;
    if !fst.is_epsilon_free() {
        return Err(Error::InvalidFst(
            "epsilon input arcs present, run rmepsilon first".into(),
        ));
    }
    let Some(start) = fst.start() else {
        return Ok(Wfst::new());
    };
    let mut encoder = PairEncoder::default();
    let acceptor = encoder.encode(fst);

    let mut out = Wfst::new();
    let mut ids: HashMap<SubsetKey, StateId> = HashMap::new();
    let mut subsets: Vec<Subset> = Vec::new();

    let initial = vec![(start, 0.0)];
    ids.insert(key(&initial), out.add_state());
    subsets.push(initial);
    out.set_start(0);

    let mut cursor = 0;
    while cursor < subsets.len() {
        let subset = subsets[cursor].clone();
        let from = cursor;
        cursor += 1;

        let mut final_weight: Option<f64> = None;
        let mut by_label: BTreeMap<Label, Vec<(f64, StateId)>> = BTreeMap::new();
        for &(q, r) in &subset {
            if let Some(f) = acceptor.final_weight(q) {
                let w = r + f;
                if final_weight.is_none_or(|cur| w < cur) {
                    final_weight = Some(w);
                }
            }
            for a in acceptor.arcs(q) {
                by_label
                    .entry(a.ilabel)
                    .or_default()
                    .push((r + a.weight, a.next));
            }
        }
        if let Some(f) = final_weight {
            out.set_final(from, f);
        }

        for (label, targets) in by_label {
            let weight = targets
                .iter()
                .map(|&(w, _)| w)
                .fold(f64::INFINITY, f64::min);
            let mut residuals: BTreeMap<StateId, f64> = BTreeMap::new();
            for (w, q) in targets {
                let r = w - weight;
                residuals
                    .entry(q)
                    .and_modify(|cur| *cur = cur.min(r))
                    .or_insert(r);
            }
            let next_subset: Subset = residuals.into_iter().collect();
            let k = key(&next_subset);
            let next = match ids.get(&k) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= max_states {
                        return Err(Error::DeterminizeLimit(max_states));
                    }
                    let id = out.add_state();
                    ids.insert(k, id);
                    subsets.push(next_subset);
                    id
                }
            };
            out.add_arc(from, Arc::new(label, label, weight, next));
        }
    }
    Ok(encoder.decode(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fstlib::{enumerate_language, PhiExpansion, PHI};

    fn lang(f: &Wfst) -> crate::fstlib::Language {
        enumerate_language(f, 6, PhiExpansion::Opaque)
    }

    #[test]
    fn transducer_pairs_encoded() {
        // (a/x, 1) and (a/y, 2) from start
        let f = Wfst::from_text("0\t1\t2\t3\t1\n0\t2\t2\t4\t2\n1\n2\n").unwrap();
        let d = determinize(&f).unwrap();
        let s = d.start().unwrap();
        assert_eq!(d.arcs(s).len(), 2);
        assert_eq!(lang(&d), lang(&f));
    }

    #[test]
    fn deterministic_input_is_isomorphic() {
        let f = Wfst::from_text("0\t1\t2\t2\t1\n0\t2\t3\t3\t2\n1\t2\t4\t4\t0.5\n2\t1\n").unwrap();
        let d = determinize(&f).unwrap();
        assert_eq!(d.num_states(), f.num_states());
        assert_eq!(d.num_arcs(), f.num_arcs());
        assert_eq!(lang(&d), lang(&f));
    }

    #[test]
    fn shared_prefix_merges() {
        // "_John" = [2], "_Jo n" = [3, 4]; "_Jake" = [3, 5]
        let f = Wfst::from_text(
            "0\t1\t2\t2\t0\n0\t2\t3\t0\t0\n2\t3\t4\t2\t0\n0\t4\t3\t0\t0\n4\t5\t5\t5\t0\n1\n3\n5\n",
        )
        .unwrap();
        let d = determinize(&f).unwrap();
        let s = d.start().unwrap();
        let jo: Vec<_> = d.arcs(s).iter().filter(|a| a.ilabel == 3).collect();
        assert_eq!(jo.len(), 1, "the `3` prefix state is shared");
        assert_eq!(d.arcs(jo[0].next).len(), 2);
        assert_eq!(lang(&d), lang(&f));
    }

    #[test]
    fn keeps_min_over_duplicate_paths() {
        let f = Wfst::from_text("0\t1\t2\t2\t1\n0\t2\t2\t2\t3\n1\t0.5\n2\t0\n").unwrap();
        let d = determinize(&f).unwrap();
        assert_eq!(lang(&d)[&(vec![2], vec![2])], 1.5);
        assert!(d.is_deterministic());
    }

    #[test]
    fn phi_is_an_ordinary_label() {
        let f = Wfst::from_text("0\t1\t1\t0\t6\n0\t2\t1\t0\t7\n1\n2\n").unwrap();
        let d = determinize(&f).unwrap();
        let s = d.start().unwrap();
        assert_eq!(d.arcs(s).len(), 1);
        assert_eq!(d.arcs(s)[0].ilabel, PHI);
        assert_eq!(d.arcs(s)[0].weight, 6.0);
    }

    #[test]
    fn rejects_epsilons_and_respects_limit() {
        let f = Wfst::from_text("0\t1\t0\t0\t1\n1\n").unwrap();
        assert!(determinize(&f).is_err());
        // Non-twins cycle: a/1 and a/2 loops joined by b.
        let g = Wfst::from_text(
            "0\t1\t2\t2\t0\n0\t2\t2\t2\t0\n1\t1\t2\t2\t1\n2\t2\t2\t2\t2\n1\t3\t3\t3\t0\n2\t3\t4\t4\t0\n3\n",
        )
        .unwrap();
        assert!(matches!(
            determinize_with_limit(&g, 50),
            Err(Error::DeterminizeLimit(50))
        ));
    }
}
