use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Index of a piece in a [`Vocabulary`].
pub type PieceId = u32;

pub const DEFAULT_MARKER: &str = "_";

/// Unigram WordPiece inventory. Ids follow insertion (file) order.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pieces: Vec<(String, f64)>,
    index: HashMap<String, PieceId>,
    marker: String,
    max_piece_chars: usize,
}

impl Vocabulary {
    pub fn new(pieces: Vec<(String, f64)>) -> Result<Self> {
        Self::with_marker(pieces, DEFAULT_MARKER)
    }

    pub fn with_marker(pieces: Vec<(String, f64)>, marker: &str) -> Result<Self> {
        if marker.is_empty() {
            return Err(Error::InvalidArgument("empty word-boundary marker".into()));
        }
        let mut index = HashMap::with_capacity(pieces.len());
        let mut max_piece_chars = 0;
        for (id, (piece, logprob)) in pieces.iter().enumerate() {
            if piece.is_empty() {
                return Err(Error::InvalidArgument(format!("empty piece at id {id}")));
            }
            if !logprob.is_finite() || *logprob > 0.0 {
                return Err(Error::PositiveLogprob {
                    piece: piece.clone(),
                    logprob: *logprob,
                });
            }
            if index.insert(piece.clone(), id as PieceId).is_some() {
                return Err(Error::DuplicatePiece(piece.clone()));
            }
            max_piece_chars = max_piece_chars.max(piece.chars().count());
        }
        Ok(Self {
            pieces,
            index,
            marker: marker.to_string(),
            max_piece_chars,
        })
    }

    /// Reads `piece<TAB>logprob` lines. Blank lines are skipped.
    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        let mut pieces = Vec::new();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let (piece, logprob) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("vocab", lineno + 1, "expected piece<TAB>logprob"))?;
            let logprob: f64 = logprob
                .trim()
                .parse()
                .map_err(|_| Error::parse("vocab", lineno + 1, format!("bad logprob {logprob:?}")))?;
            if !logprob.is_finite() {
                return Err(Error::parse("vocab", lineno + 1, "logprob must be finite"));
            }
            pieces.push((piece.to_string(), logprob));
        }
        Self::new(pieces)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn id(&self, piece: &str) -> Option<PieceId> {
        self.index.get(piece).copied()
    }

    pub fn piece(&self, id: PieceId) -> Option<&str> {
        self.pieces.get(id as usize).map(|(p, _)| p.as_str())
    }

    pub fn logprob(&self, id: PieceId) -> f64 {
        self.pieces[id as usize].1
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn max_piece_chars(&self) -> usize {
        self.max_piece_chars
    }

    pub fn iter(&self) -> impl Iterator<Item = (PieceId, &str, f64)> + '_ {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, (p, lp))| (i as PieceId, p.as_str(), *lp))
    }

    /// Prefixes `word` with the word-boundary marker.
    pub fn mark(&self, word: &str) -> Result<String> {
        if word.contains(self.marker.as_str()) {
            return Err(Error::MarkerInWord(word.to_string()));
        }
        Ok(format!("{}{}", self.marker, word))
    }

    /// Joins pieces and turns boundary markers back into single spaces.
    pub fn detokenize(&self, ids: &[PieceId]) -> String {
        let joined: String = ids.iter().filter_map(|&id| self.piece(id)).collect();
        let spaced = joined.replace(self.marker.as_str(), " ");
        spaced.strip_prefix(' ').unwrap_or(&spaced).to_string()
    }

    pub fn render(&self, ids: &[PieceId]) -> String {
        ids.iter()
            .map(|&id| self.piece(id).unwrap_or("<?>"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a space-separated list of piece strings.
    pub fn lookup_all(&self, pieces: &str) -> Result<Vec<PieceId>> {
        pieces
            .split_whitespace()
            .map(|p| {
                self.id(p)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown piece {p:?}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_reads_back_in_order() {
        let v = Vocabulary::load("a\t-1.0\nb\t-2.0".as_bytes()).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.id("b"), Some(1));
        assert_eq!(v.logprob(1), -2.0);
    }

    #[test]
    fn duplicate_piece_rejected() {
        let err = Vocabulary::load("a\t-1.0\na\t-1.5".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicatePiece(p) if p == "a"));
    }

    #[test]
    fn positive_logprob_rejected() {
        let err = Vocabulary::load("a\t0.5".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::PositiveLogprob { .. }));
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(matches!(
            Vocabulary::load("a -1.0".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Vocabulary::load("a\t-1\nb\tx".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Vocabulary::load("a\tNaN".as_bytes()).is_err());
    }

    #[test]
    fn large_vocab_file() {
        let text: String = (0..4096).map(|i| format!("p{i}\t-{}.5\n", i % 13)).collect();
        let v = Vocabulary::load(text.as_bytes()).unwrap();
        assert_eq!(v.len(), 4096);
        assert_eq!(v.id("p4095"), Some(4095));
    }

    #[test]
    fn detokenize_strips_markers() {
        let v = Vocabulary::new(vec![
            ("_he".into(), -1.0),
            ("y".into(), -1.0),
            ("_port".into(), -1.0),
            ("al".into(), -1.0),
        ])
        .unwrap();
        assert_eq!(v.detokenize(&[0, 1, 2, 3]), "hey portal");
        assert!(v.mark("a_b").is_err());
    }
}
