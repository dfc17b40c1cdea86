use std::collections::{BTreeMap, HashMap};

use super::{Label, StateId, Wfst, EPS, PHI};

/// (input string, output string) → tropical-min weight. Strings exclude EPS.
pub type Language = BTreeMap<(Vec<Label>, Vec<Label>), f64>;

/// How PHI input arcs are read during enumeration.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiExpansion {
    /// PHI is an ordinary symbol.
    Opaque,
    /// PHI matches every symbol of the alphabet.
    Wildcard(Vec<Label>),
    /// PHI matches alphabet symbols that have no explicit arc at the same state.
    Failure(Vec<Label>),
}

type Key = (StateId, Vec<Label>, Vec<Label>);

fn relax(map: &mut HashMap<Key, f64>, key: Key, w: f64) -> bool {
    match map.get_mut(&key) {
        Some(cur) if *cur <= w => false,
        Some(cur) => {
            *cur = w;
            true
        }
        None => {
            map.insert(key, w);
            true
        }
    }
}

fn push_output(out: &[Label], olabel: Label) -> Vec<Label> {
    let mut v = out.to_vec();
    if olabel != EPS {
        v.push(olabel);
    }
    v
}

/// All accepted (input, output) pairs with at most `max_len` input symbols,
/// aggregated by tropical min. Epsilon-input arcs are followed as true
/// epsilons; weights along a path are summed left to right.
pub fn enumerate_language(fst: &Wfst, max_len: usize, phi: PhiExpansion) -> Language {
    let mut result = Language::new();
    let Some(start) = fst.start() else {
        return result;
    };
    let n = fst.num_states();
    let max_out = max_len + n * (max_len + 1);

    let mut level: HashMap<Key, f64> = HashMap::new();
    level.insert((start, Vec::new(), Vec::new()), 0.0);
    for consumed in 0..=max_len {
        // epsilon closure within this input length
        let mut work: Vec<Key> = level.keys().cloned().collect();
        let mut rounds = 0;
        while !work.is_empty() && rounds <= n + 1 {
            rounds += 1;
            let mut next_work = Vec::new();
            for key in work {
                let w = level[&key];
                let (q, ref input, ref output) = key;
                for a in fst.arcs(q).iter().filter(|a| a.ilabel == EPS) {
                    let out = push_output(output, a.olabel);
                    if out.len() > max_out {
                        continue;
                    }
                    let k = (a.next, input.clone(), out);
                    if relax(&mut level, k.clone(), w + a.weight) {
                        next_work.push(k);
                    }
                }
            }
            work = next_work;
        }

        for ((q, input, output), &w) in &level {
            if let Some(f) = fst.final_weight(*q) {
                let total = w + f;
                result
                    .entry((input.clone(), output.clone()))
                    .and_modify(|cur| *cur = cur.min(total))
                    .or_insert(total);
            }
        }
        if consumed == max_len {
            break;
        }

        let mut next: HashMap<Key, f64> = HashMap::new();
        for ((q, input, output), &w) in &level {
            let arcs = fst.arcs(*q);
            for a in arcs.iter().filter(|a| a.ilabel != EPS) {
                let out = push_output(output, a.olabel);
                let mut emit = |sym: Label| {
                    let mut inp = input.clone();
                    inp.push(sym);
                    relax(&mut next, (a.next, inp, out.clone()), w + a.weight);
                };
                match (&phi, a.ilabel) {
                    (PhiExpansion::Wildcard(alphabet), PHI) => {
                        alphabet.iter().for_each(|&x| emit(x));
                    }
                    (PhiExpansion::Failure(alphabet), PHI) => alphabet
                        .iter()
                        .filter(|&&x| !arcs.iter().any(|b| b.ilabel == x))
                        .for_each(|&x| emit(x)),
                    _ => emit(a.ilabel),
                }
            }
        }
        level = next;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_fst() {
        let mut f = Wfst::new();
        f.add_state();
        f.set_start(0);
        assert!(enumerate_language(&f, 5, PhiExpansion::Opaque).is_empty());
        assert!(enumerate_language(&Wfst::new(), 5, PhiExpansion::Opaque).is_empty());
    }

    #[test]
    fn phi_modes() {
        // start --x(2)/1--> F ; start --PHI(1)/5--> F
        let f = Wfst::from_text("0\t1\t2\t0\t1\n0\t1\t1\t0\t5\n1\n").unwrap();
        let opaque = enumerate_language(&f, 1, PhiExpansion::Opaque);
        assert_eq!(opaque[&(vec![1], vec![])], 5.0);

        let wild = enumerate_language(&f, 1, PhiExpansion::Wildcard(vec![2, 3]));
        assert_eq!(wild[&(vec![2], vec![])], 1.0);
        assert_eq!(wild[&(vec![3], vec![])], 5.0);

        let fail = enumerate_language(&f, 1, PhiExpansion::Failure(vec![2, 3]));
        assert_eq!(fail[&(vec![2], vec![])], 1.0);
        assert_eq!(fail[&(vec![3], vec![])], 5.0);

        let g = Wfst::from_text("0\t1\t2\t0\t9\n0\t1\t1\t0\t5\n1\n").unwrap();
        assert_eq!(
            enumerate_language(&g, 1, PhiExpansion::Wildcard(vec![2]))[&(vec![2], vec![])],
            5.0
        );
        assert_eq!(
            enumerate_language(&g, 1, PhiExpansion::Failure(vec![2]))[&(vec![2], vec![])],
            9.0
        );
    }

    #[test]
    fn cycles_bounded_by_length() {
        let f = Wfst::from_text("0\t0\t2\t2\t1\n0\n").unwrap();
        let lang = enumerate_language(&f, 3, PhiExpansion::Opaque);
        assert_eq!(lang.len(), 4);
        assert_eq!(lang[&(vec![2, 2, 2], vec![2, 2, 2])], 3.0);
    }
}
