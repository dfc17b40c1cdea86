use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fstlib::{Label, StateId, Wfst, EPS, PHI};

#[derive(Debug, Clone, PartialEq)]
struct Frontier {
    weight: f64,
    output: Vec<Label>,
}

/// Position in a biasing graph after a sequence of pieces: the set of live
/// graph states (epsilon-closed) with their best accumulated cost and the
/// word olabels emitted on that best path. An empty set is the dead end.
#[derive(Debug, Clone, PartialEq)]
pub struct LmState {
    live: BTreeMap<StateId, Frontier>,
}

impl LmState {
    /// Best accumulated cost, `+inf` at a dead end.
    pub fn weight(&self) -> f64 {
        self.live
            .values()
            .map(|f| f.weight)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_dead(&self) -> bool {
        self.live.is_empty()
    }

    fn best(&self) -> Option<(StateId, &Frontier)> {
        self.live
            .iter()
            .min_by(|a, b| a.1.weight.total_cmp(&b.1.weight))
            .map(|(&s, f)| (s, f))
    }

    /// Olabels emitted along the cheapest live path.
    pub fn output(&self) -> &[Label] {
        self.best().map_or(&[], |(_, f)| f.output.as_slice())
    }

    /// Cheapest total cost of ending here, including final weights.
    pub fn final_weight(&self, graph: &Wfst) -> Option<f64> {
        self.live
            .iter()
            .filter_map(|(&s, f)| graph.final_weight(s).map(|w| f.weight + w))
            .min_by(f64::total_cmp)
    }

    /// Olabels of the cheapest path that can end here, counting final
    /// weights. Falls back to [`output`](Self::output) when no live state is
    /// final.
    pub fn final_output(&self, graph: &Wfst) -> &[Label] {
        self.live
            .iter()
            .filter_map(|(&s, f)| graph.final_weight(s).map(|w| (f.weight + w, f)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.output.cmp(&b.1.output)))
            .map_or_else(|| self.output(), |(_, f)| f.output.as_slice())
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.live.keys().copied()
    }

    fn insert(&mut self, state: StateId, weight: f64, output: Vec<Label>) -> bool {
        match self.live.get_mut(&state) {
            Some(cur)
                if cur.weight < weight || (cur.weight == weight && cur.output <= output) =>
            {
                false
            }
            Some(cur) => {
                *cur = Frontier { weight, output };
                true
            }
            None => {
                self.live.insert(state, Frontier { weight, output });
                true
            }
        }
    }

    fn close(&mut self, graph: &Wfst) {
        let limit = graph.num_states() + 1;
        let mut updates = vec![0usize; graph.num_states()];
        let mut work: Vec<StateId> = self.live.keys().copied().collect();
        while let Some(q) = work.pop() {
            let Some(from) = self.live.get(&q).cloned() else { continue };
            for a in graph.arcs(q).iter().filter(|a| a.ilabel == EPS) {
                let mut output = from.output.clone();
                if a.olabel != EPS {
                    output.push(a.olabel);
                }
                if self.insert(a.next, from.weight + a.weight, output) {
                    updates[a.next] += 1;
                    if updates[a.next] <= limit {
                        work.push(a.next);
                    }
                }
            }
        }
    }
}

/// State at the graph start, epsilon-closed, cost 0.
pub fn lm_start(graph: &Wfst) -> Result<LmState> {
    let start = graph.start().ok_or(Error::EmptyGraph)?;
    let mut state = LmState {
        live: BTreeMap::new(),
    };
    state.insert(start, 0.0, Vec::new());
    state.close(graph);
    Ok(state)
}

/// Consumes one piece label. At each live state an explicit arc for the
/// label wins; PHI is followed only where no explicit arc exists. EPS arcs
/// (backoff, class entry/exit) are followed afterwards as epsilons.
pub fn lm_advance(graph: &Wfst, state: &LmState, piece: Label) -> Result<LmState> {
    if piece == EPS || piece == PHI {
        return Err(Error::ReservedSymbol(piece));
    }
    let mut next = LmState {
        live: BTreeMap::new(),
    };
    for (&q, from) in &state.live {
        let arcs = graph.arcs(q);
        let explicit = arcs.iter().any(|a| a.ilabel == piece);
        let wanted = if explicit { piece } else { PHI };
        for a in arcs.iter().filter(|a| a.ilabel == wanted) {
            let mut output = from.output.clone();
            if a.olabel != EPS {
                output.push(a.olabel);
            }
            next.insert(a.next, from.weight + a.weight, output);
        }
    }
    next.close(graph);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_arc_beats_phi() {
        let g = Wfst::from_text("0\t1\t5\t0\t9\n0\t2\t1\t0\t6\n1\n2\n").unwrap();
        let s0 = lm_start(&g).unwrap();
        let s = lm_advance(&g, &s0, 5).unwrap();
        assert_eq!(s.weight(), 9.0);
        assert_eq!(s.states().collect::<Vec<_>>(), vec![1]);
        let t = lm_advance(&g, &s0, 7).unwrap();
        assert_eq!(t.weight(), 6.0);
    }

    #[test]
    fn dead_end_and_reserved() {
        let g = Wfst::from_text("0\t1\t5\t0\t1\n1\n").unwrap();
        let s0 = lm_start(&g).unwrap();
        let dead = lm_advance(&g, &s0, 6).unwrap();
        assert!(dead.is_dead());
        assert_eq!(dead.weight(), f64::INFINITY);
        assert!(lm_advance(&g, &dead, 5).unwrap().is_dead());
        assert!(matches!(lm_advance(&g, &s0, PHI), Err(Error::ReservedSymbol(1))));
        assert!(matches!(lm_advance(&g, &s0, EPS), Err(Error::ReservedSymbol(0))));
    }

    #[test]
    fn start_state() {
        let g = Wfst::from_text("0\t1\t5\t0\t1\n1\n").unwrap();
        let s0 = lm_start(&g).unwrap();
        assert_eq!(s0.weight(), 0.0);
        assert_eq!(s0.states().collect::<Vec<_>>(), vec![0]);
        assert!(matches!(lm_start(&Wfst::new()), Err(Error::EmptyGraph)));
    }

    #[test]
    fn backoff_and_outputs() {
        // 0 -a(5):A/1-> 1 ; 1 -eps/2-> 0 ; 0 final
        let g = Wfst::from_text("0\t1\t5\t8\t1\n1\t0\t0\t0\t2\n0\n").unwrap();
        let mut s = lm_start(&g).unwrap();
        for _ in 0..3 {
            s = lm_advance(&g, &s, 5).unwrap();
        }
        assert_eq!(s.weight(), 7.0);
        assert_eq!(s.output(), &[8, 8, 8]);
        assert_eq!(s.final_weight(&g), Some(9.0));
    }
}
