use std::cmp::Ordering;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::vocab::{PieceId, Vocabulary};
use crate::error::{Error, Result};

/// One way of splitting a string into vocabulary pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub pieces: Vec<PieceId>,
    /// Sum of member log-probabilities, accumulated left to right.
    pub logprob: f64,
}

impl Segmentation {
    /// Ranking used everywhere: higher logprob first, then fewer pieces,
    /// then the lexicographically smaller id sequence.
    pub fn rank(&self, other: &Self) -> Ordering {
        other
            .logprob
            .total_cmp(&self.logprob)
            .then_with(|| self.pieces.len().cmp(&other.pieces.len()))
            .then_with(|| self.pieces.cmp(&other.pieces))
    }
}

/// Arcs of the segmentation lattice, grouped by end position (in chars).
fn lattice(text: &str, vocab: &Vocabulary) -> Vec<Vec<(usize, PieceId)>> {
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(text.len()))
        .collect();
    let n = bounds.len() - 1;
    let max = vocab.max_piece_chars();
    let mut ending = vec![Vec::new(); n + 1];
    for (end, arcs) in ending.iter_mut().enumerate().skip(1) {
        for start in end.saturating_sub(max)..end {
            if let Some(id) = vocab.id(&text[bounds[start]..bounds[end]]) {
                arcs.push((start, id));
            }
        }
    }
    ending
}

/// Exact k-best over the lattice. Keeping the top `l` partial parses per
/// position is sufficient because the ranking is preserved under appending
/// the same piece to two prefixes.
fn kbest(text: &str, vocab: &Vocabulary, l: usize) -> Result<Vec<Segmentation>> {
    if text.is_empty() {
        return Err(Error::InvalidArgument("cannot segment an empty string".into()));
    }
    let ending = lattice(text, vocab);
    let n = ending.len() - 1;
    let mut best: Vec<Vec<Segmentation>> = Vec::with_capacity(n + 1);
    best.push(vec![Segmentation {
        pieces: Vec::new(),
        logprob: 0.0,
    }]);
    for arcs in ending.iter().skip(1) {
        let mut cands = Vec::new();
        for &(start, id) in arcs {
            for prefix in &best[start] {
                let mut pieces = Vec::with_capacity(prefix.pieces.len() + 1);
                pieces.extend_from_slice(&prefix.pieces);
                pieces.push(id);
                cands.push(Segmentation {
                    pieces,
                    logprob: prefix.logprob + vocab.logprob(id),
                });
            }
        }
        cands.sort_by(Segmentation::rank);
        cands.truncate(l);
        best.push(cands);
    }
    let out = best.pop().unwrap_or_default();
    if out.is_empty() {
        return Err(Error::Unsegmentable(text.to_string()));
    }
    Ok(out)
}

/// Viterbi best segmentation of `text` exactly as given (no marker added).
pub fn best_parse(text: &str, vocab: &Vocabulary) -> Result<Segmentation> {
    kbest(text, vocab, 1).map(|mut v| v.swap_remove(0))
}

/// The top `min(l, total)` segmentations, best first.
pub fn nbest_parses(text: &str, vocab: &Vocabulary, l: usize) -> Result<Vec<Segmentation>> {
    if l == 0 {
        return Err(Error::InvalidArgument("n-best size must be at least 1".into()));
    }
    kbest(text, vocab, l)
}

/// Draws from the n-best with probability proportional to `P(s)^alpha`.
pub fn sample_parse<R: Rng + ?Sized>(
    text: &str,
    vocab: &Vocabulary,
    l: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<Segmentation> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
    }
    let mut nbest = nbest_parses(text, vocab, l)?;
    if nbest.len() == 1 {
        return Ok(nbest.swap_remove(0));
    }
    let weights = sampling_weights(&nbest, alpha);
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidArgument(format!("degenerate sampling weights: {e}")))?;
    Ok(nbest.swap_remove(dist.sample(rng)))
}

/// Unnormalized `P^alpha`, scaled so the largest weight is 1.
fn sampling_weights(nbest: &[Segmentation], alpha: f64) -> Vec<f64> {
    let top = nbest
        .iter()
        .map(|s| alpha * s.logprob)
        .fold(f64::NEG_INFINITY, f64::max);
    nbest
        .iter()
        .map(|s| (alpha * s.logprob - top).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vocab(entries: &[(&str, f64)]) -> Vocabulary {
        Vocabulary::new(entries.iter().map(|(p, l)| (p.to_string(), *l)).collect()).unwrap()
    }

    #[test]
    fn whole_piece_beats_two_singles() {
        let v = vocab(&[("a", -1.0), ("aa", -1.5)]);
        let s = best_parse("aa", &v).unwrap();
        assert_eq!(s.pieces, vec![1]);
        assert_eq!(s.logprob, -1.5);
    }

    #[test]
    fn single_option() {
        let v = vocab(&[("a", -1.0)]);
        let s = best_parse("a", &v).unwrap();
        assert_eq!(s.pieces, vec![0]);
        assert_eq!(s.logprob, -1.0);
    }

    #[test]
    fn ties_prefer_fewer_pieces_then_smaller_ids() {
        // a=0 b=1 c=2 ab=3 bc=4; [ab,c]=[3,2] vs [a,bc]=[0,4]
        let v = vocab(&[("a", -1.0), ("b", -1.0), ("c", -1.0), ("ab", -1.0), ("bc", -1.0)]);
        let s = best_parse("abc", &v).unwrap();
        assert_eq!(s.pieces, vec![0, 4]);
        assert_eq!(s.logprob, -2.0);

        let all = nbest_parses("abc", &v, 10).unwrap();
        let seqs: Vec<_> = all.iter().map(|s| s.pieces.clone()).collect();
        assert_eq!(seqs, vec![vec![0, 4], vec![3, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn nbest_of_one_is_best() {
        let v = vocab(&[("a", -0.5), ("b", -1.0), ("ab", -1.75), ("ba", -1.25)]);
        for w in ["abab", "baba", "aabb"] {
            let b = best_parse(w, &v).unwrap();
            assert_eq!(nbest_parses(w, &v, 1).unwrap(), vec![b]);
        }
    }

    #[test]
    fn nbest_bounded_by_l() {
        let v = vocab(&[("a", -0.5), ("aa", -1.0), ("aaa", -1.25)]);
        assert_eq!(nbest_parses("aaaaaa", &v, 5).unwrap().len(), 5);
        assert!(nbest_parses("aaaa", &v, 0).is_err());
    }

    #[test]
    fn unsegmentable_is_an_error() {
        let v = vocab(&[("a", -1.0)]);
        assert!(matches!(best_parse("ab", &v), Err(Error::Unsegmentable(_))));
        assert!(best_parse("", &v).is_err());
    }

    #[test]
    fn multibyte_characters() {
        let v = vocab(&[("▁", -3.0), ("é", -1.0), ("▁é", -1.0), ("ü", -2.0)]);
        let s = best_parse("▁éü", &v).unwrap();
        assert_eq!(s.pieces, vec![2, 3]);
    }

    #[test]
    fn alpha_zero_and_l_one() {
        let v = vocab(&[("a", -0.25), ("aa", -4.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let best = best_parse("aa", &v).unwrap();
        for _ in 0..50 {
            assert_eq!(sample_parse("aa", &v, 1, 0.25, &mut rng).unwrap(), best);
        }
        let mut seen = [0usize; 2];
        for _ in 0..4000 {
            let s = sample_parse("aa", &v, 2, 0.0, &mut rng).unwrap();
            seen[usize::from(s.pieces.len() == 1)] += 1;
        }
        assert!((seen[0] as f64 / 4000.0 - 0.5).abs() < 0.04, "{seen:?}");
        assert!(sample_parse("aa", &v, 2, -1.0, &mut rng).is_err());
    }
}
