//! Prefix-trie PLM: the contact trie answers "which pieces can extend this
//! prefix into a contact name", and the three resulting bit vectors are
//! projected into the joiner's embedding space.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::biasing::ContactList;
use crate::error::{Error, Result};
use crate::tokenizer::{phrase_pieces, PieceId, Vocabulary};

type NodeId = usize;

const ROOT: NodeId = 0;

#[derive(Debug, Clone, Default, PartialEq)]
struct Node {
    children: BTreeMap<PieceId, NodeId>,
    terminal: bool,
}

/// Prefix tree over the piece sequences of every contact spelling.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactTrie {
    nodes: Vec<Node>,
    vocab_size: usize,
}

/// Builds the trie from every spelling (variants included) of `contacts`.
pub fn build_trie(contacts: &ContactList, vocab: &Vocabulary) -> Result<ContactTrie> {
    if contacts.is_empty() {
        return Err(Error::EmptyContactList);
    }
    let sequences = contacts
        .spellings()
        .map(|(_, sp)| phrase_pieces(sp, vocab))
        .collect::<Result<Vec<_>>>()?;
    ContactTrie::from_sequences(&sequences, vocab.len())
}

impl ContactTrie {
    pub fn from_sequences(sequences: &[Vec<PieceId>], vocab_size: usize) -> Result<Self> {
        let mut trie = Self {
            nodes: vec![Node::default()],
            vocab_size,
        };
        for seq in sequences {
            if seq.is_empty() {
                return Err(Error::InvalidArgument("empty piece sequence in trie".into()));
            }
            let mut node = ROOT;
            for &p in seq {
                if p as usize >= vocab_size {
                    return Err(Error::InvalidArgument(format!("piece id {p} outside vocabulary of {vocab_size}")));
                }
                node = match trie.nodes[node].children.get(&p) {
                    Some(&next) => next,
                    None => {
                        trie.nodes.push(Node::default());
                        let next = trie.nodes.len() - 1;
                        trie.nodes[node].children.insert(p, next);
                        next
                    }
                };
            }
            trie.nodes[node].terminal = true;
        }
        Ok(trie)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn walk(&self, prefix: &[PieceId]) -> Option<NodeId> {
        prefix
            .iter()
            .try_fold(ROOT, |node, p| self.nodes[node].children.get(p).copied())
    }

    fn child(&self, node: NodeId, piece: PieceId) -> Option<NodeId> {
        self.nodes[node].children.get(&piece).copied()
    }

    /// True when `sequence` is a complete spelling.
    pub fn contains(&self, sequence: &[PieceId]) -> bool {
        self.walk(sequence).is_some_and(|n| self.nodes[n].terminal)
    }

    fn set_children(&self, node: NodeId, v: &mut BiasVector) {
        for &p in self.nodes[node].children.keys() {
            v.bits[p as usize] = true;
        }
    }
}

/// Length-V indicator of the pieces that keep a prefix inside the trie.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BiasVector {
    bits: Vec<bool>,
}

impl BiasVector {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize) {
        self.bits[i] = true;
    }

    /// Ids of the set entries, ascending.
    pub fn ones(&self) -> Vec<PieceId> {
        (0..self.bits.len())
            .filter(|&i| self.bits[i])
            .map(|i| i as PieceId)
            .collect()
    }

    pub fn or_assign(&mut self, other: &BiasVector) {
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }
}

/// `Trie(prefix)`: bit i is set iff `prefix ⊕ i` is a prefix of some
/// spelling. Unknown prefixes give the zero vector.
pub fn trie_query(trie: &ContactTrie, prefix: &[PieceId]) -> BiasVector {
    let mut v = BiasVector::zeros(trie.vocab_size);
    if let Some(node) = trie.walk(prefix) {
        trie.set_children(node, &mut v);
    }
    v
}

/// `Trie≥2(history)`: OR of `Trie` over every suffix of `history` with at
/// least two pieces.
pub fn trie_query_ge2(trie: &ContactTrie, history: &[PieceId]) -> BiasVector {
    let mut state = SuffixState::new();
    for &p in history {
        state.push(trie, p);
    }
    state.query_ge2(trie)
}

/// Trie nodes reached by the suffixes of a growing history, kept per
/// hypothesis so each emitted piece costs O(live nodes).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SuffixState {
    /// node of the length-1 suffix, if it is in the trie
    last: Option<NodeId>,
    /// nodes of suffixes with two or more pieces
    longer: Vec<NodeId>,
}

impl SuffixState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, trie: &ContactTrie, piece: PieceId) {
        let mut longer: Vec<NodeId> = self
            .last
            .iter()
            .chain(&self.longer)
            .filter_map(|&n| trie.child(n, piece))
            .collect();
        longer.sort_unstable();
        self.longer = longer;
        self.last = trie.child(ROOT, piece);
    }

    /// `Trie(y_{u-1})`; zero for an empty history.
    pub fn query_last(&self, trie: &ContactTrie) -> BiasVector {
        let mut v = BiasVector::zeros(trie.vocab_size);
        if let Some(n) = self.last {
            trie.set_children(n, &mut v);
        }
        v
    }

    pub fn query_ge2(&self, trie: &ContactTrie) -> BiasVector {
        let mut v = BiasVector::zeros(trie.vocab_size);
        for &n in &self.longer {
            trie.set_children(n, &mut v);
        }
        v
    }
}

/// `W_plm`, a d × 3V matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PlmProjection {
    dim: usize,
    vocab_size: usize,
    weights: Vec<f64>,
}

impl PlmProjection {
    pub fn new(dim: usize, vocab_size: usize, weights: Vec<f64>) -> Result<Self> {
        let expected = dim * 3 * vocab_size;
        if weights.len() != expected {
            return Err(Error::shape(format!("{dim} x {} weights", 3 * vocab_size), weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("projection entries must be finite".into()));
        }
        Ok(Self {
            dim,
            vocab_size,
            weights,
        })
    }

    pub fn zeros(dim: usize, vocab_size: usize) -> Self {
        Self {
            dim,
            vocab_size,
            weights: vec![0.0; dim * 3 * vocab_size],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let width = 3 * self.vocab_size;
        &self.weights[r * width..(r + 1) * width]
    }

    /// Header `d V`, then d rows of 3V whitespace-separated reals.
    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        const WHAT: &str = "projection";
        let mut lines = source
            .lines()
            .enumerate()
            .map(|(i, l)| l.map(|l| (i + 1, l)))
            .filter(|l| l.as_ref().map_or(true, |(_, l)| !l.trim().is_empty()));
        let (lineno, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(WHAT, 1, "missing `d V` header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(WHAT, lineno, format!("bad header {header:?}")))?;
        let [dim, vocab_size] = dims[..] else {
            return Err(Error::parse(WHAT, lineno, "header must be `d V`"));
        };
        if dim == 0 || vocab_size == 0 {
            return Err(Error::parse(WHAT, lineno, "d and V must be positive"));
        }
        let width = vocab_size
            .checked_mul(3)
            .filter(|w| w.checked_mul(dim).is_some())
            .ok_or_else(|| Error::parse(WHAT, lineno, "d and V are too large"))?;
        let mut weights = Vec::new();
        for row in 0..dim {
            let (lineno, line) = lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::parse(WHAT, lineno + row + 1, format!("expected {dim} rows")))?;
            let values: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(WHAT, lineno, "bad real"))?;
            if values.len() != width {
                return Err(Error::parse(WHAT, lineno, format!("row has {} values, expected {width}", values.len())));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(WHAT, lineno, "non-finite value"));
            }
            weights.extend(values);
        }
        if let Some((lineno, _)) = lines.next().transpose()? {
            return Err(Error::parse(WHAT, lineno, "trailing row"));
        }
        Ok(Self {
            dim,
            vocab_size,
            weights,
        })
    }

    /// `W_plm · [a; b; c]` for three length-V indicators.
    pub fn apply(&self, parts: [&BiasVector; 3]) -> Result<Vec<f64>> {
        for part in parts {
            if part.len() != self.vocab_size {
                return Err(Error::shape(format!("bias vector of length {}", self.vocab_size), part.len()));
            }
        }
        let ones: Vec<usize> = parts
            .iter()
            .enumerate()
            .flat_map(|(k, v)| v.ones().into_iter().map(move |i| k * self.vocab_size + i as usize))
            .collect();
        Ok((0..self.dim)
            .map(|r| {
                let row = self.row(r);
                ones.iter().map(|&c| row[c]).sum()
            })
            .collect())
    }
}

/// `h_plm = W_plm [Trie(); Trie(y_{u-1}); Trie≥2(y_1..y_{u-1})]`.
pub fn plm_embed(trie: &ContactTrie, history: &[PieceId], proj: &PlmProjection) -> Result<Vec<f64>> {
    let mut state = SuffixState::new();
    for &p in history {
        state.push(trie, p);
    }
    plm_embed_state(trie, &state, proj)
}

/// Same as [`plm_embed`] from an already-advanced suffix state.
pub fn plm_embed_state(trie: &ContactTrie, state: &SuffixState, proj: &PlmProjection) -> Result<Vec<f64>> {
    if proj.vocab_size != trie.vocab_size {
        return Err(Error::shape(format!("projection over V={}", trie.vocab_size), format!("V={}", proj.vocab_size)));
    }
    let root = trie_query(trie, &[]);
    proj.apply([&root, &state.query_last(trie), &state.query_ge2(trie)])
}
