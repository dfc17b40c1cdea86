//! Brute-force oracles and random instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;

use ctxbias::biasing::{lm_advance, lm_start, piece_label};
use ctxbias::decoder::{fuse, Scorer};
use ctxbias::fstlib::{Arc, Label, Wfst, EPS, PHI};
use ctxbias::plm::{plm_embed, ContactTrie, PlmProjection};
use ctxbias::tokenizer::{PieceId, Vocabulary};

/// Random acyclic FST: arcs only go from lower to higher state ids.
/// Weights are small dyadic rationals so tropical sums are exact.
pub fn random_acyclic_fst<R: Rng>(rng: &mut R, max_states: usize, labels: &[Label], eps_prob: f64) -> Wfst {
    let n = rng.gen_range(1..=max_states);
    let mut f = Wfst::new();
    f.add_states(n);
    f.set_start(0);
    for s in 0..n {
        if rng.gen_bool(0.35) || s == n - 1 {
            f.set_final(s, dyadic(rng));
        }
        if s + 1 == n {
            continue;
        }
        for _ in 0..rng.gen_range(0..=3) {
            let next = rng.gen_range(s + 1..n);
            let (i, o) = if rng.gen_bool(eps_prob) {
                (EPS, EPS)
            } else {
                let i = labels[rng.gen_range(0..labels.len())];
                let o = if rng.gen_bool(0.3) { EPS } else { labels[rng.gen_range(0..labels.len())] };
                (i, o)
            };
            f.add_arc(s, Arc::new(i, o, dyadic(rng), next));
        }
    }
    f
}

pub fn dyadic<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(0..16) as f64 / 4.0
}

/// Random graph over piece labels `2..V+2`, possibly cyclic, with PHI and
/// forward EPS arcs, non-negative weights.
pub fn random_graph<R: Rng>(rng: &mut R, vocab_size: usize) -> Wfst {
    let n = rng.gen_range(1..=5);
    let mut f = Wfst::new();
    f.add_states(n);
    f.set_start(0);
    for s in 0..n {
        if rng.gen_bool(0.5) {
            f.set_final(s, dyadic(rng));
        }
        for _ in 0..rng.gen_range(0..=vocab_size + 1) {
            let next = rng.gen_range(0..n);
            let roll: f64 = rng.gen();
            let ilabel = if roll < 0.15 {
                PHI
            } else if roll < 0.25 && next > s {
                EPS
            } else {
                piece_label(rng.gen_range(0..vocab_size as PieceId))
            };
            f.add_arc(s, Arc::new(ilabel, EPS, dyadic(rng), next));
        }
    }
    f
}

/// Is `prefix ⊕ i` a prefix of some sequence, for every piece i.
pub fn oracle_trie_query(seqs: &[Vec<PieceId>], prefix: &[PieceId], vocab_size: usize) -> Vec<PieceId> {
    (0..vocab_size as PieceId)
        .filter(|&i| {
            seqs.iter()
                .any(|s| s.len() > prefix.len() && s.starts_with(prefix) && s[prefix.len()] == i)
        })
        .collect()
}

/// Naive OR over every suffix of length >= 2.
pub fn oracle_trie_ge2(seqs: &[Vec<PieceId>], history: &[PieceId], vocab_size: usize) -> Vec<PieceId> {
    let mut bits = vec![false; vocab_size];
    for k in 2..=history.len() {
        for i in oracle_trie_query(seqs, &history[history.len() - k..], vocab_size) {
            bits[i as usize] = true;
        }
    }
    (0..vocab_size as PieceId).filter(|&i| bits[i as usize]).collect()
}

pub fn random_sequences<R: Rng>(rng: &mut R, count: usize, vocab_size: usize, max_len: usize) -> Vec<Vec<PieceId>> {
    // a narrow id range makes shared prefixes likely
    let hot = vocab_size.min(rng.gen_range(2..=12));
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| {
                    if rng.gen_bool(0.8) {
                        rng.gen_range(0..hot as PieceId)
                    } else {
                        rng.gen_range(0..vocab_size as PieceId)
                    }
                })
                .collect()
        })
        .collect()
}

/// Every segmentation of `text` into vocabulary pieces.
pub fn all_segmentations(text: &str, vocab: &Vocabulary) -> Vec<(Vec<PieceId>, f64)> {
    if text.is_empty() {
        return vec![(Vec::new(), 0.0)];
    }
    let mut out = Vec::new();
    for (id, piece, lp) in vocab.iter() {
        if let Some(rest) = text.strip_prefix(piece) {
            for (mut tail, tail_lp) in all_segmentations(rest, vocab) {
                tail.insert(0, id);
                out.push((tail, lp + tail_lp));
            }
        }
    }
    out
}

/// Exhaustive search over all alignments: per frame up to `max_symbols`
/// emissions then BLANK. Returns the best model score of every reachable
/// piece sequence.
pub fn exhaustive_model_scores(
    scorer: &dyn Scorer,
    plm: Option<(&ContactTrie, &PlmProjection)>,
    max_symbols: usize,
) -> BTreeMap<Vec<PieceId>, f64> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        scorer: &dyn Scorer,
        plm: Option<(&ContactTrie, &PlmProjection)>,
        max_symbols: usize,
        t: usize,
        s: usize,
        pieces: &mut Vec<PieceId>,
        model: f64,
        out: &mut BTreeMap<Vec<PieceId>, f64>,
    ) {
        if t == scorer.num_frames() {
            let e = out.entry(pieces.clone()).or_insert(f64::NEG_INFINITY);
            if model > *e {
                *e = model;
            }
            return;
        }
        let h = plm.map(|(trie, proj)| plm_embed(trie, pieces, proj).unwrap());
        let lp = scorer.log_probs(t, pieces, h.as_deref()).unwrap();
        let v = scorer.vocab_size();
        if lp[v] > f64::NEG_INFINITY {
            rec(scorer, plm, max_symbols, t + 1, 0, pieces, model + lp[v], out);
        }
        if s < max_symbols {
            for (k, &x) in lp[..v].iter().enumerate() {
                if x == f64::NEG_INFINITY {
                    continue;
                }
                pieces.push(k as PieceId);
                rec(scorer, plm, max_symbols, t, s + 1, pieces, model + x, out);
                pieces.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    rec(scorer, plm, max_symbols, 0, 0, &mut Vec::new(), 0.0, &mut out);
    out
}

/// Accumulated graph cost of a piece sequence, `inf` at a dead end.
pub fn lm_cost(graph: &Wfst, pieces: &[PieceId]) -> f64 {
    let mut s = lm_start(graph).unwrap();
    for &p in pieces {
        s = lm_advance(graph, &s, piece_label(p)).unwrap();
    }
    s.weight()
}

/// Best fused (pieces, score) by brute force; ties go to the smaller
/// piece sequence.
pub fn exhaustive_best(
    scorer: &dyn Scorer,
    graph: Option<&Wfst>,
    plm: Option<(&ContactTrie, &PlmProjection)>,
    lambda: f64,
    max_symbols: usize,
) -> Option<(Vec<PieceId>, f64)> {
    let mut best: Option<(Vec<PieceId>, f64)> = None;
    for (pieces, model) in exhaustive_model_scores(scorer, plm, max_symbols) {
        let cost = graph.map_or(0.0, |g| lm_cost(g, &pieces));
        let fused = fuse(model, cost, lambda);
        if best.as_ref().is_none_or(|(_, b)| fused > *b) {
            best = Some((pieces, fused));
        }
    }
    best
}

/// Asymptotic Kolmogorov p-value of statistic `d` from `n` samples.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Vocabulary of the two-contact fixture: John (variant Jon) and Kaity
/// (variant Katie).
pub fn john_kaity_vocab() -> Vocabulary {
    let pieces = [
        ("_call", -2.0),
        ("_John", -3.0),
        ("_Jo", -3.0),
        ("n", -2.0),
        ("_K", -3.0),
        ("aity", -4.0),
        ("_Katie", -5.0),
        ("_Kady", -5.0),
        ("_", -8.0),
        ("a", -6.0),
        ("i", -6.0),
        ("t", -6.0),
        ("y", -6.0),
        ("e", -6.0),
        ("o", -6.0),
        ("h", -6.0),
        ("l", -6.0),
        ("c", -6.0),
        ("J", -6.0),
        ("K", -6.0),
        ("d", -6.0),
    ];
    Vocabulary::new(pieces.iter().map(|(p, lp)| (p.to_string(), *lp)).collect()).unwrap()
}

/// No state has two arcs with the same (ilabel, olabel) pair.
pub fn pair_deterministic(f: &Wfst) -> bool {
    f.states().all(|s| {
        let mut pairs: Vec<(Label, Label)> = f.arcs(s).iter().map(|a| (a.ilabel, a.olabel)).collect();
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    })
}
