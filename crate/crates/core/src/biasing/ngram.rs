use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::corpus::PatternCorpus;
use crate::error::{Error, Result};
use crate::fstlib::{Arc, StateId, SymbolTable, Wfst, EPS};

const BOS: &str = "<s>";
const EOS: &str = "</s>";

type Context = Vec<String>;

/// Interpolated Witten-Bell estimates over weighted n-gram counts.
struct WittenBell {
    /// context → (next token → weighted count)
    counts: BTreeMap<Context, BTreeMap<String, f64>>,
    vocab_size: usize,
    memo: HashMap<(Context, String), f64>,
}

impl WittenBell {
    fn new(corpus: &PatternCorpus, order: usize) -> Self {
        let mut counts: BTreeMap<Context, BTreeMap<String, f64>> = BTreeMap::new();
        for (words, weight) in &corpus.patterns {
            let tokens: Vec<&str> = std::iter::once(BOS)
                .chain(words.iter().map(String::as_str))
                .chain(std::iter::once(EOS))
                .collect();
            for i in 1..tokens.len() {
                for k in 0..order.min(i + 1) {
                    let ctx: Context = tokens[i - k..i].iter().map(|s| s.to_string()).collect();
                    *counts
                        .entry(ctx)
                        .or_default()
                        .entry(tokens[i].to_string())
                        .or_default() += weight;
                }
            }
        }
        let vocab_size = counts.get(&Vec::new()).map_or(0, BTreeMap::len);
        Self {
            counts,
            vocab_size,
            memo: HashMap::new(),
        }
    }

    /// (total count, distinct follower types)
    fn totals(&self, ctx: &[String]) -> Option<(f64, f64)> {
        self.counts
            .get(ctx)
            .map(|f| (f.values().sum(), f.len() as f64))
    }

    fn prob(&mut self, ctx: &[String], word: &str) -> f64 {
        let key = (ctx.to_vec(), word.to_string());
        if let Some(&p) = self.memo.get(&key) {
            return p;
        }
        let lower = if ctx.is_empty() {
            1.0 / self.vocab_size as f64
        } else {
            self.prob(&ctx[1..], word)
        };
        let p = match self.totals(ctx) {
            Some((total, types)) => {
                let c = self.counts[ctx].get(word).copied().unwrap_or(0.0);
                (c + types * lower) / (total + types)
            }
            None => lower,
        };
        self.memo.insert(key, p);
        p
    }

    fn backoff(&self, ctx: &[String]) -> f64 {
        let (total, types) = self.totals(ctx).expect("backoff only for seen contexts");
        types / (total + types)
    }
}

/// Builds a word-level backoff n-gram acceptor. States are the seen
/// histories (up to `order - 1` words); each has explicit arcs for the
/// words seen after it, an EPS backoff arc to its shortened history and a
/// final weight for end-of-sentence. Words (including `@name`) are added to
/// `words`.
pub fn build_pattern_lm(corpus: &PatternCorpus, order: usize, words: &mut SymbolTable) -> Result<Wfst> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if order == 0 {
        return Err(Error::InvalidArgument("n-gram order must be at least 1".into()));
    }
    let mut wb = WittenBell::new(corpus, order);

    let vocab: BTreeSet<String> = wb.counts[&Vec::new()].keys().cloned().collect();
    for w in vocab.iter().filter(|w| *w != EOS) {
        words.add(w);
    }

    let contexts: Vec<Context> = {
        let mut c: Vec<Context> = wb.counts.keys().filter(|c| c.len() < order).cloned().collect();
        c.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        c
    };
    let index: HashMap<Context, StateId> = contexts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let state_of = |mut ctx: Vec<String>| -> StateId {
        if ctx.len() >= order {
            ctx.drain(..ctx.len() + 1 - order);
        }
        loop {
            if let Some(&s) = index.get(&ctx) {
                return s;
            }
            ctx.remove(0);
        }
    };

    let mut fst = Wfst::new();
    fst.add_states(contexts.len());
    let start_ctx: Context = if order >= 2 { vec![BOS.to_string()] } else { Vec::new() };
    fst.set_start(index[&start_ctx]);

    for (s, ctx) in contexts.iter().enumerate() {
        let followers: Vec<String> = if ctx.is_empty() {
            vocab.iter().cloned().collect()
        } else {
            wb.counts[ctx].keys().cloned().collect()
        };
        for w in followers {
            let cost = -wb.prob(ctx, &w).ln();
            if w == EOS {
                fst.set_final(s, cost);
                continue;
            }
            let label = words.find(&w).expect("vocabulary words were added");
            let mut next_ctx = ctx.clone();
            next_ctx.push(w);
            fst.add_arc(s, Arc::new(label, label, cost, state_of(next_ctx)));
        }
        if fst.final_weight(s).is_none() {
            fst.set_final(s, -wb.prob(ctx, EOS).ln());
        }
        if !ctx.is_empty() {
            let back = index[&ctx[1..].to_vec()];
            fst.add_arc(s, Arc::new(EPS, EPS, -wb.backoff(ctx).ln(), back));
        }
    }
    Ok(fst)
}
