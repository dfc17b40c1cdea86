use std::collections::HashMap;
use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};
use crate::tokenizer::{PieceId, Vocabulary};

/// Largest tolerated deviation of a scorer row's log-sum-exp from zero.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Transducer output distribution: for frame `t` and emitted history,
/// log-probabilities over the V pieces followed by BLANK at index V.
pub trait Scorer: Sync {
    fn num_frames(&self) -> usize;

    fn vocab_size(&self) -> usize;

    /// Width of the PLM embedding this scorer adds into its joiner, or
    /// `None` if it takes no PLM input.
    fn plm_dim(&self) -> Option<usize> {
        None
    }

    fn log_probs(&self, t: usize, history: &[PieceId], h_plm: Option<&[f64]>) -> Result<Vec<f64>>;
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(logits);
    logits.iter().map(|x| x - z).collect()
}

fn longest_suffix<'a, T>(map: &'a HashMap<Vec<PieceId>, T>, history: &[PieceId]) -> Option<&'a T> {
    (0..=history.len()).find_map(|start| map.get(&history[start..]))
}

/// Explicit per-frame tables keyed by history suffix; lookup uses the
/// longest stored suffix of the actual history.
#[derive(Debug, Clone, PartialEq)]
pub struct TableScorer {
    frames: usize,
    vocab_size: usize,
    tables: Vec<HashMap<Vec<PieceId>, Vec<f64>>>,
}

impl TableScorer {
    pub fn new(frames: usize, vocab_size: usize) -> Self {
        Self {
            frames,
            vocab_size,
            tables: Vec::new(),
        }
    }

    /// Stores a row; it must have V+1 entries that normalize to one.
    pub fn insert(&mut self, t: usize, history: Vec<PieceId>, log_probs: Vec<f64>) -> Result<()> {
        if t >= self.frames {
            return Err(Error::InvalidArgument(format!("frame {t} outside 0..{}", self.frames)));
        }
        if log_probs.len() != self.vocab_size + 1 {
            return Err(Error::shape(self.vocab_size + 1, log_probs.len()));
        }
        if history.iter().any(|&p| p as usize >= self.vocab_size) {
            return Err(Error::InvalidArgument(format!("history {history:?} outside the vocabulary")));
        }
        if log_probs.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(Error::InvalidArgument("log-probabilities must be finite or -inf".into()));
        }
        let z = log_sum_exp(&log_probs);
        if z.abs() > NORMALIZATION_TOLERANCE || z.is_nan() {
            return Err(Error::InvalidArgument(format!("row log-sum-exp is {z}, not 0")));
        }
        if self.tables.len() <= t {
            self.tables.resize_with(t + 1, HashMap::new);
        }
        self.tables[t].insert(history, log_probs);
        Ok(())
    }

    /// Header `T V`, then `t<TAB>history pieces<TAB>V+1 log-probs`, with
    /// history written as space-separated piece strings (empty for the
    /// root) and log-probs separated by whitespace.
    pub fn load<R: BufRead>(source: R, vocab: &Vocabulary) -> Result<Self> {
        const WHAT: &str = "scorer table";
        let mut scorer: Option<Self> = None;
        for (lineno, line) in source.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse(WHAT, lineno, msg);
            let Some(table) = scorer.as_mut() else {
                let dims: Vec<usize> = line
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err(format!("bad header {line:?}")))?;
                let [frames, v] = dims[..] else {
                    return Err(err("header must be `T V`".into()));
                };
                if v != vocab.len() {
                    return Err(err(format!("header V={v} but vocabulary has {} pieces", vocab.len())));
                }
                if frames == 0 {
                    return Err(err("T must be positive".into()));
                }
                scorer = Some(Self::new(frames, v));
                continue;
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 3 {
                return Err(err("expected t<TAB>history<TAB>log-probs".into()));
            }
            let t: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad frame {:?}", fields[0])))?;
            let history = vocab.lookup_all(fields[1]).map_err(|e| err(e.to_string()))?;
            let values: Vec<f64> = fields[2..]
                .iter()
                .flat_map(|f| f.split_whitespace())
                .map(|x| x.parse::<f64>().map_err(|_| err(format!("bad log-prob {x:?}"))))
                .collect::<Result<_>>()?;
            table
                .insert(t, history, values)
                .map_err(|e| err(e.to_string()))?;
        }
        scorer.ok_or_else(|| Error::parse(WHAT, 1, "missing `T V` header"))
    }
}

impl Scorer for TableScorer {
    fn num_frames(&self) -> usize {
        self.frames
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn log_probs(&self, t: usize, history: &[PieceId], _h_plm: Option<&[f64]>) -> Result<Vec<f64>> {
        self.tables
            .get(t)
            .and_then(|table| longest_suffix(table, history))
            .cloned()
            .ok_or_else(|| Error::ScorerDomain {
                frame: t,
                history: history.to_vec(),
            })
    }
}

/// Largest encoder or joint table a toy-joiner file may declare.
pub const MAX_JOINER_CELLS: usize = 1 << 24;

/// Additive toy joiner: `log_softmax(W (h_enc(t) + h_pred(history) + h_plm) + b)`.
/// `h_pred` is looked up by longest history suffix and is zero when no
/// suffix is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyJoiner {
    dim: usize,
    vocab_size: usize,
    encoder: Vec<Vec<f64>>,
    predictor: HashMap<Vec<PieceId>, Vec<f64>>,
    /// (V+1) rows of length d
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl ToyJoiner {
    /// All-zero tables: a uniform distribution at every step.
    pub fn zeros(frames: usize, vocab_size: usize, dim: usize) -> Self {
        Self {
            dim,
            vocab_size,
            encoder: vec![vec![0.0; dim]; frames],
            predictor: HashMap::new(),
            weights: vec![vec![0.0; dim]; vocab_size + 1],
            bias: vec![0.0; vocab_size + 1],
        }
    }

    /// Random toy: entries uniform in [-scale, scale], with
    /// predictor vectors for every history up to `max_history` pieces.
    pub fn random<R: Rng + ?Sized>(
        frames: usize,
        vocab_size: usize,
        dim: usize,
        max_history: usize,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-scale..=scale)).collect() };
        let mut j = Self::zeros(frames, vocab_size, dim);
        for row in j.encoder.iter_mut() {
            *row = draw(dim);
        }
        for row in j.weights.iter_mut() {
            *row = draw(dim);
        }
        j.bias = draw(vocab_size + 1);
        let mut level: Vec<Vec<PieceId>> = vec![Vec::new()];
        for _ in 0..=max_history {
            let mut next = Vec::new();
            for h in level {
                j.predictor.insert(h.clone(), draw(dim));
                for p in 0..vocab_size as PieceId {
                    let mut longer = h.clone();
                    longer.push(p);
                    next.push(longer);
                }
            }
            level = next;
        }
        j
    }

    pub fn set_encoder(&mut self, t: usize, h: Vec<f64>) -> Result<()> {
        self.check_dim(&h)?;
        let frames = self.encoder.len();
        *self
            .encoder
            .get_mut(t)
            .ok_or_else(|| Error::InvalidArgument(format!("frame {t} outside 0..{frames}")))? = h;
        Ok(())
    }

    pub fn set_predictor(&mut self, history: Vec<PieceId>, h: Vec<f64>) -> Result<()> {
        self.check_dim(&h)?;
        if history.iter().any(|&p| p as usize >= self.vocab_size) {
            return Err(Error::InvalidArgument(format!("history {history:?} outside the vocabulary")));
        }
        self.predictor.insert(history, h);
        Ok(())
    }

    pub fn set_weight_row(&mut self, k: usize, row: Vec<f64>) -> Result<()> {
        self.check_dim(&row)?;
        let rows = self.weights.len();
        *self
            .weights
            .get_mut(k)
            .ok_or_else(|| Error::InvalidArgument(format!("joiner row {k} outside 0..{rows}")))? = row;
        Ok(())
    }

    pub fn set_bias(&mut self, bias: Vec<f64>) -> Result<()> {
        if bias.len() != self.vocab_size + 1 {
            return Err(Error::shape(self.vocab_size + 1, bias.len()));
        }
        self.bias = bias;
        Ok(())
    }

    fn check_dim(&self, h: &[f64]) -> Result<()> {
        if h.len() != self.dim {
            return Err(Error::shape(self.dim, h.len()));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("joiner entries must be finite".into()));
        }
        Ok(())
    }

    pub fn logits(&self, t: usize, history: &[PieceId], h_plm: Option<&[f64]>) -> Result<Vec<f64>> {
        let enc = self.encoder.get(t).ok_or_else(|| Error::ScorerDomain {
            frame: t,
            history: history.to_vec(),
        })?;
        let mut h = enc.clone();
        if let Some(pred) = longest_suffix(&self.predictor, history) {
            for (a, b) in h.iter_mut().zip(pred) {
                *a += b;
            }
        }
        if let Some(plm) = h_plm {
            if plm.len() != self.dim {
                return Err(Error::shape(self.dim, plm.len()));
            }
            for (a, b) in h.iter_mut().zip(plm) {
                *a += b;
            }
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(&h).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect())
    }

    /// Text form:
    ///
    /// ```text
    /// toy-joiner T V d
    /// enc<TAB>t<TAB>d reals
    /// pred<TAB>history pieces<TAB>d reals
    /// join<TAB>k<TAB>d reals
    /// bias<TAB>V+1 reals
    /// ```
    ///
    /// Rows that are not given stay zero.
    pub fn load<R: BufRead>(source: R, vocab: &Vocabulary) -> Result<Self> {
        const WHAT: &str = "toy joiner";
        let mut joiner: Option<Self> = None;
        for (lineno, line) in source.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse(WHAT, lineno, msg);
            let reals = |field: &str| -> Result<Vec<f64>> {
                field
                    .split_whitespace()
                    .map(|x| x.parse::<f64>().map_err(|_| err(format!("bad real {x:?}"))))
                    .collect()
            };
            let Some(j) = joiner.as_mut() else {
                let mut parts = line.split_whitespace();
                if parts.next() != Some("toy-joiner") {
                    return Err(err("header must be `toy-joiner T V d`".into()));
                }
                let dims: Vec<usize> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err(format!("bad header {line:?}")))?;
                let [frames, v, d] = dims[..] else {
                    return Err(err("header must be `toy-joiner T V d`".into()));
                };
                if v != vocab.len() {
                    return Err(err(format!("header V={v} but vocabulary has {} pieces", vocab.len())));
                }
                if frames == 0 || d == 0 {
                    return Err(err("T and d must be positive".into()));
                }
                let cells = frames.max(v + 1).checked_mul(d);
                if cells.is_none_or(|c| c > MAX_JOINER_CELLS) {
                    return Err(err(format!("T={frames}, d={d} exceed the toy joiner size limit")));
                }
                joiner = Some(Self::zeros(frames, v, d));
                continue;
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let result = match fields[..] {
                ["enc", t, values] => {
                    let t = t.trim().parse().map_err(|_| err(format!("bad frame {t:?}")))?;
                    j.set_encoder(t, reals(values)?)
                }
                ["pred", history, values] => {
                    let history = vocab.lookup_all(history).map_err(|e| err(e.to_string()))?;
                    j.set_predictor(history, reals(values)?)
                }
                ["join", k, values] => {
                    let k = k.trim().parse().map_err(|_| err(format!("bad row {k:?}")))?;
                    j.set_weight_row(k, reals(values)?)
                }
                ["bias", values] => {
                    let b = reals(values)?;
                    if b.iter().any(|x| !x.is_finite()) {
                        return Err(err("bias must be finite".into()));
                    }
                    j.set_bias(b)
                }
                _ => return Err(err(format!("unrecognized line {line:?}"))),
            };
            result.map_err(|e| err(e.to_string()))?;
        }
        joiner.ok_or_else(|| Error::parse(WHAT, 1, "missing `toy-joiner T V d` header"))
    }
}

impl Scorer for ToyJoiner {
    fn num_frames(&self) -> usize {
        self.encoder.len()
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn plm_dim(&self) -> Option<usize> {
        Some(self.dim)
    }

    fn log_probs(&self, t: usize, history: &[PieceId], h_plm: Option<&[f64]>) -> Result<Vec<f64>> {
        Ok(log_softmax(&self.logits(t, history, h_plm)?))
    }
}
