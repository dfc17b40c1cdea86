//! Weighted finite-state transducers over the tropical semiring.
//!
//! Weights are costs (negative log-probabilities): paths combine with `+`,
//! alternatives with `min`. Label 0 is epsilon and label 1 is the failure
//! label PHI. PHI is opaque here; its matching rules live with the callers
//! (see `biasing::lm` and [`PhiExpansion`]).

mod determinize;
mod enumerate;
mod minimize;
mod rmepsilon;
mod symbols;
mod text;

pub use determinize::{determinize, determinize_with_limit, DEFAULT_DETERMINIZE_LIMIT};
pub use enumerate::{enumerate_language, Language, PhiExpansion};
pub use minimize::{minimize, push_weights};
pub use rmepsilon::rmepsilon;
pub use symbols::SymbolTable;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Label = u32;
pub type StateId = usize;

pub const EPS: Label = 0;
pub const PHI: Label = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: f64,
    pub next: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: f64, next: StateId) -> Self {
        Self {
            ilabel,
            olabel,
            weight,
            next,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Wfst {
    start: Option<StateId>,
    arcs: Vec<Vec<Arc>>,
    finals: Vec<Option<f64>>,
}

impl Wfst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self) -> StateId {
        self.arcs.push(Vec::new());
        self.finals.push(None);
        self.arcs.len() - 1
    }

    pub fn add_states(&mut self, n: usize) {
        self.arcs.resize_with(self.arcs.len() + n, Vec::new);
        self.finals.resize(self.finals.len() + n, None);
    }

    pub fn set_start(&mut self, s: StateId) {
        assert!(s < self.num_states(), "start state {s} out of range");
        self.start = Some(s);
    }

    pub fn set_final(&mut self, s: StateId, weight: f64) {
        self.finals[s] = Some(weight);
    }

    pub fn clear_final(&mut self, s: StateId) {
        self.finals[s] = None;
    }

    pub fn add_arc(&mut self, s: StateId, arc: Arc) {
        self.arcs[s].push(arc);
    }

    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self, s: StateId) -> &[Arc] {
        &self.arcs[s]
    }

    pub(crate) fn arcs_mut(&mut self, s: StateId) -> &mut Vec<Arc> {
        &mut self.arcs[s]
    }

    pub fn final_weight(&self, s: StateId) -> Option<f64> {
        self.finals[s]
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s].is_some()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    /// Checks arc targets, start validity and weight finiteness.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.start {
            if s >= self.num_states() {
                return Err(Error::InvalidFst(format!("start {s} out of range")));
            }
        }
        for s in self.states() {
            if let Some(w) = self.finals[s] {
                if !w.is_finite() {
                    return Err(Error::InvalidFst(format!("state {s}: non-finite final weight")));
                }
            }
            for a in &self.arcs[s] {
                if a.next >= self.num_states() {
                    return Err(Error::InvalidFst(format!(
                        "state {s}: arc target {} out of range",
                        a.next
                    )));
                }
                if !a.weight.is_finite() {
                    return Err(Error::InvalidFst(format!("state {s}: non-finite arc weight")));
                }
            }
        }
        Ok(())
    }

    /// No state has two arcs with the same input label.
    pub fn is_deterministic(&self) -> bool {
        self.first_nondeterministic_state().is_none()
    }

    pub(crate) fn first_nondeterministic_state(&self) -> Option<StateId> {
        self.states().find(|&s| {
            let mut labels: Vec<Label> = self.arcs[s].iter().map(|a| a.ilabel).collect();
            labels.sort_unstable();
            labels.windows(2).any(|w| w[0] == w[1])
        })
    }

    pub fn is_epsilon_free(&self) -> bool {
        self.arcs.iter().flatten().all(|a| a.ilabel != EPS)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Topological order of all states, or `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<StateId>> {
        let n = self.num_states();
        let mut indegree = vec![0usize; n];
        for a in self.arcs.iter().flatten() {
            indegree[a.next] += 1;
        }
        let mut queue: Vec<StateId> = (0..n).filter(|&s| indegree[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = queue.pop() {
            order.push(s);
            for a in &self.arcs[s] {
                indegree[a.next] -= 1;
                if indegree[a.next] == 0 {
                    queue.push(a.next);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = self.start.into_iter().collect();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            stack.extend(self.arcs[s].iter().map(|a| a.next).filter(|&n| !seen[n]));
        }
        seen
    }

    fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut reverse = vec![Vec::new(); n];
        for s in self.states() {
            for a in &self.arcs[s] {
                reverse[a.next].push(s);
            }
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<StateId> = self.states().filter(|&s| self.is_final(s)).collect();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            stack.extend(reverse[s].iter().copied().filter(|&p| !seen[p]));
        }
        seen
    }

    /// Removes states that are not on some start-to-final path. Surviving
    /// states keep their relative order. An FST with an empty language
    /// becomes the empty FST.
    pub fn connect(&self) -> Wfst {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        let mut map = vec![None; self.num_states()];
        let mut out = Wfst::new();
        for s in self.states() {
            if acc[s] && coacc[s] {
                map[s] = Some(out.add_state());
            }
        }
        let Some(start) = self.start.and_then(|s| map[s]) else {
            return Wfst::new();
        };
        out.set_start(start);
        for s in self.states() {
            let Some(ns) = map[s] else { continue };
            out.finals[ns] = self.finals[s];
            for a in &self.arcs[s] {
                if let Some(nn) = map[a.next] {
                    out.add_arc(ns, Arc { next: nn, ..*a });
                }
            }
        }
        out
    }

    /// Collapses parallel arcs with identical labels and target, keeping the
    /// cheapest.
    pub(crate) fn merge_parallel_arcs(&mut self) {
        for arcs in &mut self.arcs {
            let mut best: HashMap<(Label, Label, StateId), usize> = HashMap::new();
            let mut kept: Vec<Arc> = Vec::with_capacity(arcs.len());
            for a in arcs.drain(..) {
                match best.get(&(a.ilabel, a.olabel, a.next)) {
                    Some(&i) => {
                        if a.weight < kept[i].weight {
                            kept[i].weight = a.weight;
                        }
                    }
                    None => {
                        best.insert((a.ilabel, a.olabel, a.next), kept.len());
                        kept.push(a);
                    }
                }
            }
            *arcs = kept;
        }
    }

    /// Sorts each state's arcs by (ilabel, olabel, next, weight).
    pub fn sort_arcs(&mut self) {
        for arcs in &mut self.arcs {
            arcs.sort_by(|a, b| {
                (a.ilabel, a.olabel, a.next)
                    .cmp(&(b.ilabel, b.olabel, b.next))
                    .then(a.weight.total_cmp(&b.weight))
            });
        }
    }

    /// Appends a copy of `other`, returning the state offset of the copy.
    pub fn append(&mut self, other: &Wfst) -> StateId {
        let offset = self.num_states();
        for s in other.states() {
            self.arcs.push(
                other.arcs[s]
                    .iter()
                    .map(|a| Arc {
                        next: a.next + offset,
                        ..*a
                    })
                    .collect(),
            );
            self.finals.push(other.finals[s]);
        }
        offset
    }

    /// Applies `f` to every arc label pair.
    pub(crate) fn map_labels(&self, mut f: impl FnMut(Label, Label) -> (Label, Label)) -> Wfst {
        let mut out = self.clone();
        for a in out.arcs.iter_mut().flatten() {
            (a.ilabel, a.olabel) = f(a.ilabel, a.olabel);
        }
        out
    }
}

/// Bijective encoding of (ilabel, olabel) pairs as single labels. EPS:EPS
/// maps to EPS so epsilon structure survives encoding.
#[derive(Debug, Default)]
pub(crate) struct PairEncoder {
    forward: HashMap<(Label, Label), Label>,
    backward: Vec<(Label, Label)>,
}

impl PairEncoder {
    pub(crate) fn encode(&mut self, fst: &Wfst) -> Wfst {
        fst.map_labels(|i, o| {
            if i == EPS && o == EPS {
                return (EPS, EPS);
            }
            let next = self.backward.len() as Label + 1;
            let code = *self.forward.entry((i, o)).or_insert(next);
            if code == next {
                self.backward.push((i, o));
            }
            (code, code)
        })
    }

    pub(crate) fn decode(&self, fst: &Wfst) -> Wfst {
        fst.map_labels(|code, _| {
            if code == EPS {
                (EPS, EPS)
            } else {
                self.backward[code as usize - 1]
            }
        })
    }
}
