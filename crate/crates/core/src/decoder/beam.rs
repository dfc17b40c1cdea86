use std::cmp::Ordering;
use std::collections::HashMap;

use super::scorer::Scorer;
use crate::biasing::{lm_advance, lm_start, piece_label, LmState};
use crate::error::{Error, Result};
use crate::fstlib::{Label, Wfst};
use crate::plm::{trie_query, BiasVector, ContactTrie, PlmProjection, SuffixState};
use crate::tokenizer::PieceId;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    pub beam: usize,
    /// Shallow-fusion weight on the biasing graph's log-probability.
    pub lambda: f64,
    pub max_symbols: usize,
    pub plm: bool,
    pub nbest: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            beam: 8,
            lambda: 1.0,
            max_symbols: 4,
            plm: false,
            nbest: 1,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beam == 0 || self.max_symbols == 0 || self.nbest == 0 {
            return Err(Error::InvalidArgument("beam, max symbols and nbest must be at least 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda {} must be finite and >= 0", self.lambda)));
        }
        Ok(())
    }
}

/// Contact trie and projection feeding the joiner's PLM input.
#[derive(Debug, Clone, Copy)]
pub struct PlmContext<'a> {
    pub trie: &'a ContactTrie,
    pub proj: &'a PlmProjection,
}

/// Log-linear shallow fusion of a model log-probability with a tropical LM
/// cost. With `lambda == 0` the model score passes through untouched, even
/// at an LM dead end.
pub fn fuse(model_logprob: f64, lm_weight: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        model_logprob
    } else if lm_weight == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        model_logprob - lambda * lm_weight
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub pieces: Vec<PieceId>,
    /// Graph output labels along the best path of `pieces`.
    pub olabels: Vec<Label>,
    pub score: f64,
    pub model_score: f64,
    /// Accumulated graph cost (0 without a graph).
    pub lm_weight: f64,
}

#[derive(Debug, Clone)]
struct Hyp {
    pieces: Vec<PieceId>,
    model: f64,
    fused: f64,
    lm: Option<LmState>,
    suffix: SuffixState,
}

impl Hyp {
    fn lm_weight(&self) -> f64 {
        self.lm.as_ref().map_or(0.0, LmState::weight)
    }
}

fn rank(a: &Hyp, b: &Hyp) -> Ordering {
    b.fused
        .total_cmp(&a.fused)
        .then_with(|| b.model.total_cmp(&a.model))
        .then_with(|| a.pieces.cmp(&b.pieces))
}

/// Keeps the better-scoring copy of identical piece sequences.
fn merge(into: &mut HashMap<Vec<PieceId>, Hyp>, hyp: Hyp) {
    match into.get_mut(&hyp.pieces) {
        Some(cur) if rank(&hyp, cur) == Ordering::Less => *cur = hyp,
        Some(_) => {}
        None => {
            into.insert(hyp.pieces.clone(), hyp);
        }
    }
}

fn prune(hyps: HashMap<Vec<PieceId>, Hyp>, beam: usize) -> Vec<Hyp> {
    let mut v: Vec<Hyp> = hyps.into_values().collect();
    v.sort_by(rank);
    v.truncate(beam);
    v
}

struct Plm<'a> {
    ctx: PlmContext<'a>,
    root: BiasVector,
}

impl Plm<'_> {
    fn embed(&self, suffix: &SuffixState) -> Result<Vec<f64>> {
        let trie = self.ctx.trie;
        self.ctx
            .proj
            .apply([&self.root, &suffix.query_last(trie), &suffix.query_ge2(trie)])
    }
}

/// Time-synchronous transducer beam search. At every frame each hypothesis
/// may emit up to `max_symbols` pieces before its BLANK; every emission is
/// scored against the biasing graph and fused before the beam is pruned.
/// Hypotheses with the same piece sequence are merged by max. Results are
/// sorted by fused score, best first.
pub fn beam_decode<S: Scorer + ?Sized>(
    scorer: &S,
    graph: Option<&Wfst>,
    plm: Option<PlmContext<'_>>,
    config: &DecodeConfig,
) -> Result<Vec<DecodeResult>> {
    config.validate()?;
    let v = scorer.vocab_size();
    let plm = match (config.plm, plm) {
        (false, _) => None,
        (true, None) => return Err(Error::InvalidArgument("PLM enabled without a trie and projection".into())),
        (true, Some(ctx)) => {
            if scorer.plm_dim() != Some(ctx.proj.dim()) {
                return Err(Error::shape(
                    format!("scorer PLM width {:?}", scorer.plm_dim()),
                    format!("projection dim {}", ctx.proj.dim()),
                ));
            }
            if ctx.trie.vocab_size() != v || ctx.proj.vocab_size() != v {
                return Err(Error::shape(
                    format!("V={v}"),
                    format!("trie V={}, projection V={}", ctx.trie.vocab_size(), ctx.proj.vocab_size()),
                ));
            }
            Some(Plm {
                root: trie_query(ctx.trie, &[]),
                ctx,
            })
        }
    };
    let lm = graph.map(lm_start).transpose()?;
    let start = Hyp {
        pieces: Vec::new(),
        model: 0.0,
        fused: fuse(0.0, lm.as_ref().map_or(0.0, LmState::weight), config.lambda),
        lm,
        suffix: SuffixState::new(),
    };

    let mut beam = vec![start];
    for t in 0..scorer.num_frames() {
        let mut next_frame: HashMap<Vec<PieceId>, Hyp> = HashMap::new();
        let mut current = std::mem::take(&mut beam);
        for s in 0..=config.max_symbols {
            let mut emitted: HashMap<Vec<PieceId>, Hyp> = HashMap::new();
            for h in &current {
                let h_plm = plm.as_ref().map(|p| p.embed(&h.suffix)).transpose()?;
                let lp = scorer.log_probs(t, &h.pieces, h_plm.as_deref())?;
                if lp.len() != v + 1 {
                    return Err(Error::shape(v + 1, lp.len()));
                }
                if lp[v] > f64::NEG_INFINITY {
                    let model = h.model + lp[v];
                    merge(
                        &mut next_frame,
                        Hyp {
                            model,
                            fused: fuse(model, h.lm_weight(), config.lambda),
                            ..h.clone()
                        },
                    );
                }
                if s == config.max_symbols {
                    continue;
                }
                for (k, &logprob) in lp[..v].iter().enumerate() {
                    if logprob == f64::NEG_INFINITY {
                        continue;
                    }
                    let k = k as PieceId;
                    let lm = match &h.lm {
                        Some(state) => Some(lm_advance(graph.expect("lm state implies graph"), state, piece_label(k))?),
                        None => None,
                    };
                    let mut suffix = h.suffix.clone();
                    if let Some(p) = &plm {
                        suffix.push(p.ctx.trie, k);
                    }
                    let mut pieces = h.pieces.clone();
                    pieces.push(k);
                    let model = h.model + logprob;
                    let lm_weight = lm.as_ref().map_or(0.0, LmState::weight);
                    merge(
                        &mut emitted,
                        Hyp {
                            pieces,
                            model,
                            fused: fuse(model, lm_weight, config.lambda),
                            lm,
                            suffix,
                        },
                    );
                }
            }
            current = prune(emitted, config.beam);
            if current.is_empty() {
                break;
            }
        }
        beam = prune(next_frame, config.beam);
        log::trace!("frame {t}: {} hypotheses", beam.len());
    }

    beam.truncate(config.nbest);
    Ok(beam
        .into_iter()
        .map(|h| DecodeResult {
            olabels: match (&h.lm, graph) {
                (Some(s), Some(g)) => s.final_output(g).to_vec(),
                _ => Vec::new(),
            },
            lm_weight: h.lm_weight(),
            pieces: h.pieces,
            score: h.fused,
            model_score: h.model,
        })
        .collect())
}
