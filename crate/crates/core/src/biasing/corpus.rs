use std::io::BufRead;

use crate::error::{Error, Result};
use crate::g2g::{decode_variants, G2GMap};

pub const CLASS_TAG: &str = "@name";

/// Weighted calling patterns, e.g. `call @name`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatternCorpus {
    pub patterns: Vec<(Vec<String>, f64)>,
}

impl PatternCorpus {
    pub fn push(&mut self, pattern: &str, weight: f64) -> Result<()> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("pattern weight {weight} must be > 0")));
        }
        let words: Vec<String> = pattern.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Err(Error::InvalidArgument("empty pattern".into()));
        }
        if let Some(bad) = words
            .iter()
            .find(|w| *w != CLASS_TAG && w.contains(CLASS_TAG))
        {
            return Err(Error::InvalidArgument(format!(
                "class tag must be a standalone token, found {bad:?}"
            )));
        }
        if let Some(bad) = words.iter().find(|w| *w == "<s>" || *w == "</s>") {
            return Err(Error::InvalidArgument(format!("reserved token {bad:?} in pattern")));
        }
        self.patterns.push((words, weight));
        Ok(())
    }

    /// Reads `weight<TAB>word word @name ...` lines.
    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        let mut corpus = Self::default();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse("pattern file", lineno + 1, msg);
            let (weight, pattern) = line
                .split_once('\t')
                .ok_or_else(|| err("expected weight<TAB>pattern".into()))?;
            let weight: f64 = weight
                .trim()
                .parse()
                .map_err(|_| err(format!("bad weight {weight:?}")))?;
            corpus.push(pattern, weight).map_err(|e| err(e.to_string()))?;
        }
        Ok(corpus)
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contact {
    pub display: String,
    /// Word sequences, space-separated, original spelling first.
    pub spellings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContactList {
    pub names: Vec<Contact>,
}

impl ContactList {
    pub fn push(&mut self, display: &str, spellings: &[&str]) -> Result<()> {
        let display = display.trim();
        if display.is_empty() {
            return Err(Error::InvalidArgument("empty display form".into()));
        }
        let mut normalized: Vec<String> = Vec::new();
        for sp in spellings {
            let sp = sp.split_whitespace().collect::<Vec<_>>().join(" ");
            if sp.is_empty() {
                return Err(Error::InvalidArgument(format!("empty spelling for {display:?}")));
            }
            if !normalized.contains(&sp) {
                normalized.push(sp);
            }
        }
        if normalized.is_empty() {
            return Err(Error::InvalidArgument(format!("no spelling for {display:?}")));
        }
        self.names.push(Contact {
            display: display.to_string(),
            spellings: normalized,
        });
        Ok(())
    }

    /// Reads `display<TAB>spelling1|spelling2|...` lines; a bare display
    /// form is its own spelling.
    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        let mut list = Self::default();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let result = match line.split_once('\t') {
                Some((display, spellings)) => {
                    let spellings: Vec<&str> = spellings.split('|').collect();
                    list.push(display, &spellings)
                }
                None => list.push(line, &[line]),
            };
            result.map_err(|e| Error::parse("contact list", lineno + 1, e.to_string()))?;
        }
        Ok(list)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn spellings(&self) -> impl Iterator<Item = (&Contact, &str)> + '_ {
        self.names
            .iter()
            .flat_map(|c| c.spellings.iter().map(move |s| (c, s.as_str())))
    }

    /// Adds up to `k` G2G variants per word of every spelling (all
    /// combinations across the words of multi-word spellings).
    pub fn expand_g2g(&self, map: &G2GMap, k: usize) -> ContactList {
        let names = self
            .names
            .iter()
            .map(|c| {
                let mut spellings: Vec<String> = Vec::new();
                for sp in &c.spellings {
                    let mut combos: Vec<String> = vec![String::new()];
                    for word in sp.split_whitespace() {
                        let variants = decode_variants(word, map, k);
                        combos = combos
                            .iter()
                            .flat_map(|prefix| {
                                variants.iter().map(move |v| {
                                    if prefix.is_empty() {
                                        v.clone()
                                    } else {
                                        format!("{prefix} {v}")
                                    }
                                })
                            })
                            .collect();
                    }
                    for combo in combos {
                        if !spellings.contains(&combo) {
                            spellings.push(combo);
                        }
                    }
                }
                Contact {
                    display: c.display.clone(),
                    spellings,
                }
            })
            .collect();
        ContactList { names }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_parse() {
        let c = PatternCorpus::load("3\tcall @name\n0.5\tvideo call @name now\n".as_bytes()).unwrap();
        assert_eq!(c.patterns.len(), 2);
        assert_eq!(c.patterns[0].0, ["call", "@name"]);
        assert_eq!(c.patterns[1].1, 0.5);
        for bad in ["call @name", "0\tcall", "-1\tcall", "1\t", "1\tcall @names", "x\tcall"] {
            assert!(PatternCorpus::load(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn contacts_parse() {
        let c = ContactList::load("John\tJohn|Jon\nKaity\nMary Ann\tMary  Ann\n".as_bytes()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.names[0].spellings, ["John", "Jon"]);
        assert_eq!(c.names[1].spellings, ["Kaity"]);
        assert_eq!(c.names[2].spellings, ["Mary Ann"]);
        assert!(ContactList::load("\tJohn".as_bytes()).is_err());
        assert!(ContactList::load("John\tJohn||Jon".as_bytes()).is_err());
    }

    #[test]
    fn g2g_expansion() {
        let c = ContactList::load("Kaity\nMary Ann\n".as_bytes()).unwrap();
        let m = G2GMap::load("Kaity\tKatie,Kaitee\nAnn\tAnne\n".as_bytes()).unwrap();
        let e = c.expand_g2g(&m, 2);
        assert_eq!(e.names[0].spellings, ["Kaity", "Katie", "Kaitee"]);
        assert_eq!(e.names[1].spellings, ["Mary Ann", "Mary Anne"]);
        assert_eq!(c.expand_g2g(&m, 0), c);
    }
}
