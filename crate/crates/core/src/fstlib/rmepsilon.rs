use std::collections::VecDeque;

use super::{Arc, StateId, Wfst, EPS};
use crate::error::{Error, Result};

/// Tropical shortest distances from `s` over EPS:EPS arcs (including `s`
/// itself at distance 0).
fn epsilon_closure(fst: &Wfst, s: StateId) -> Result<Vec<(StateId, f64)>> {
    let n = fst.num_states();
    let mut dist: Vec<Option<f64>> = vec![None; n];
    let mut relaxed = vec![0usize; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::from([s]);
    dist[s] = Some(0.0);
    queued[s] = true;
    while let Some(q) = queue.pop_front() {
        queued[q] = false;
        let dq = dist[q].expect("queued states have a distance");
        for a in fst.arcs(q).iter().filter(|a| a.ilabel == EPS) {
            let cand = dq + a.weight;
            if dist[a.next].is_none_or(|d| cand < d) {
                dist[a.next] = Some(cand);
                relaxed[a.next] += 1;
                if relaxed[a.next] > n {
                    return Err(Error::NegativeEpsilonCycle);
                }
                if !queued[a.next] {
                    queued[a.next] = true;
                    queue.push_back(a.next);
                }
            }
        }
    }
    if dist[s].is_some_and(|d| d < 0.0) {
        return Err(Error::NegativeEpsilonCycle);
    }
    Ok(dist
        .into_iter()
        .enumerate()
        .filter_map(|(q, d)| d.map(|d| (q, d)))
        .collect())
}

/// Removes EPS:EPS arcs, folding their weights into the following arcs and
/// final weights. Epsilon-free input is returned unchanged.
pub fn rmepsilon(fst: &Wfst) -> Result<Wfst> {
    fst.validate()?;
    for s in fst.states() {
        if fst.arcs(s).iter().any(|a| a.ilabel == EPS && a.olabel != EPS) {
            return Err(Error::EpsilonOutput(s));
        }
    }
    if fst.is_epsilon_free() {
        return Ok(fst.clone());
    }
    let mut out = Wfst::new();
    out.add_states(fst.num_states());
    if let Some(start) = fst.start() {
        out.set_start(start);
    }
    for s in fst.states() {
        let mut final_weight: Option<f64> = None;
        for (q, d) in epsilon_closure(fst, s)? {
            if let Some(f) = fst.final_weight(q) {
                let w = d + f;
                if final_weight.is_none_or(|cur| w < cur) {
                    final_weight = Some(w);
                }
            }
            for a in fst.arcs(q).iter().filter(|a| a.ilabel != EPS) {
                out.add_arc(
                    s,
                    Arc {
                        weight: d + a.weight,
                        ..*a
                    },
                );
            }
        }
        if let Some(f) = final_weight {
            out.set_final(s, f);
        }
    }
    out.merge_parallel_arcs();
    Ok(out.connect())
}
