//! Grapheme-to-grapheme spelling variants.
//!
//! A [`G2GMap`] is ingested data: `word<TAB>variant1,variant2,...`, ranked
//! best first. It drives decode-time name expansion and training-time
//! reference rewriting.

use std::collections::HashMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct G2GMap {
    variants: HashMap<String, Vec<String>>,
}

impl G2GMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the ranked variants of `word`.
    pub fn insert(&mut self, word: &str, variants: Vec<String>) -> Result<()> {
        if variants.is_empty() {
            return Err(Error::InvalidArgument(format!("no variants for {word:?}")));
        }
        self.variants.insert(word.to_string(), variants);
        Ok(())
    }

    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        let mut map = Self::new();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: &str| Error::parse("g2g map", lineno + 1, msg);
            let (word, list) = line
                .split_once('\t')
                .ok_or_else(|| err("expected word<TAB>variant,..."))?;
            let word = word.trim();
            if word.is_empty() {
                return Err(err("empty word"));
            }
            let variants: Vec<String> = list.split(',').map(|v| v.trim().to_string()).collect();
            if variants.iter().all(String::is_empty) {
                return Err(err("empty variant list"));
            }
            if variants.iter().any(String::is_empty) {
                return Err(err("empty variant"));
            }
            if map.variants.contains_key(word) {
                log::warn!("g2g map line {}: duplicate entry for {word:?}, keeping the last", lineno + 1);
            }
            map.variants.insert(word.to_string(), variants);
        }
        Ok(map)
    }

    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.variants.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    /// A word is rewritten during training only if it is in the map and its
    /// 1st-best variant differs from the written form.
    pub fn is_eligible(&self, word: &str) -> bool {
        self.get(word).is_some_and(|v| v[0] != word)
    }
}

/// The identity spelling followed by the top-`k` variants, deduplicated.
pub fn decode_variants(word: &str, map: &G2GMap, k: usize) -> Vec<String> {
    let mut out = vec![word.to_string()];
    for v in map.get(word).unwrap_or_default().iter().take(k) {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Replaces each eligible token with probability `p` by a uniformly chosen
/// non-identity variant.
pub fn train_replace<R: Rng + ?Sized>(
    tokens: &[String],
    map: &G2GMap,
    p: f64,
    rng: &mut R,
) -> Result<Vec<String>> {
    train_replace_filtered(tokens, map, p, rng, |_| true)
}

/// Like [`train_replace`], restricted to token positions accepted by `filter`
/// (e.g. positions inside a tagged entity).
pub fn train_replace_filtered<R, F>(
    tokens: &[String],
    map: &G2GMap,
    p: f64,
    rng: &mut R,
    filter: F,
) -> Result<Vec<String>>
where
    R: Rng + ?Sized,
    F: Fn(usize) -> bool,
{
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("replacement probability {p} not in [0, 1]")));
    }
    let mut out = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        if !filter(i) || !map.is_eligible(token) {
            out.push(token.clone());
            continue;
        }
        if rng.gen_bool(p) {
            let choices: Vec<&String> = map.variants[token].iter().filter(|v| *v != token).collect();
            out.push((*choices.choose(rng).expect("eligible words have a variant")).clone());
        } else {
            out.push(token.clone());
        }
    }
    Ok(out)
}
