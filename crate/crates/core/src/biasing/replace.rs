use crate::fstlib::{Arc, Label, Wfst, EPS};

/// Inlines a copy of `name_fst` in place of every arc whose input label is
/// `class_label`. The copy is entered through an EPS arc carrying the class
/// arc's weight and left through EPS arcs carrying the copy's final weights.
pub fn replace_class_tag(lm: &Wfst, name_fst: &Wfst, class_label: Label) -> Wfst {
    let class_arcs = lm
        .states()
        .flat_map(|s| lm.arcs(s).iter().map(move |a| (s, *a)))
        .filter(|(_, a)| a.ilabel == class_label)
        .count();
    if class_arcs == 0 {
        log::warn!("pattern LM has no class-tag arcs; names are not inserted");
        return lm.clone();
    }

    let mut out = Wfst::new();
    out.add_states(lm.num_states());
    if let Some(s) = lm.start() {
        out.set_start(s);
    }
    for s in lm.states() {
        if let Some(w) = lm.final_weight(s) {
            out.set_final(s, w);
        }
        for a in lm.arcs(s) {
            if a.ilabel != class_label {
                out.add_arc(s, *a);
                continue;
            }
            let Some(name_start) = name_fst.start() else { continue };
            let offset = out.append(name_fst);
            out.add_arc(s, Arc::new(EPS, EPS, a.weight, name_start + offset));
            for q in name_fst.states() {
                if let Some(f) = name_fst.final_weight(q) {
                    out.clear_final(q + offset);
                    out.add_arc(q + offset, Arc::new(EPS, EPS, f, a.next));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fstlib::{enumerate_language, PhiExpansion};

    #[test]
    fn no_class_arc_is_identity() {
        let lm = Wfst::from_text("0\t1\t2\t2\t1\n1\n").unwrap();
        let names = Wfst::from_text("0\t1\t5\t9\t0\n1\n").unwrap();
        assert_eq!(replace_class_tag(&lm, &names, 3), lm);
    }

    #[test]
    fn single_name_is_spliced_inline() {
        // lm: call(2) @name(3) ; names: a(5) b(6)/John(9)
        let lm = Wfst::from_text("0\t1\t2\t2\t1\n1\t2\t3\t3\t0.5\n2\t0.25\n").unwrap();
        let names = Wfst::from_text("0\t1\t5\t0\t0\n1\t2\t6\t9\t0.125\n2\t2\n").unwrap();
        let g = replace_class_tag(&lm, &names, 3);
        let lang = enumerate_language(&g, 4, PhiExpansion::Opaque);
        assert_eq!(lang.len(), 1);
        // 1 + 0.5 + 0.125 + 2 + 0.25
        assert_eq!(lang[&(vec![2, 5, 6], vec![2, 9])], 3.875);
    }
}
