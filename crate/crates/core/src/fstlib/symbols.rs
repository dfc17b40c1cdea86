use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use super::{Label, EPS, PHI};
use crate::error::{Error, Result};

pub const EPS_SYMBOL: &str = "<eps>";
pub const PHI_SYMBOL: &str = "<phi>";

/// Bidirectional symbol/label map with EPS and PHI pre-assigned.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    by_symbol: HashMap<String, Label>,
    by_label: BTreeMap<Label, String>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut t = Self {
            by_symbol: HashMap::new(),
            by_label: BTreeMap::new(),
        };
        t.insert(EPS_SYMBOL, EPS);
        t.insert(PHI_SYMBOL, PHI);
        t
    }

    fn insert(&mut self, symbol: &str, label: Label) {
        self.by_symbol.insert(symbol.to_string(), label);
        self.by_label.insert(label, symbol.to_string());
    }

    /// Returns the existing label for `symbol` or assigns the next free one.
    pub fn add(&mut self, symbol: &str) -> Label {
        if let Some(&l) = self.by_symbol.get(symbol) {
            return l;
        }
        let next = self.by_label.keys().next_back().map_or(0, |&l| l + 1);
        self.insert(symbol, next);
        next
    }

    pub fn find(&self, symbol: &str) -> Option<Label> {
        self.by_symbol.get(symbol).copied()
    }

    pub fn symbol(&self, label: Label) -> Option<&str> {
        self.by_label.get(&label).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_label.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, &str)> + '_ {
        self.by_label.iter().map(|(&l, s)| (l, s.as_str()))
    }

    /// Parses `symbol<TAB>id` lines. Ids 0 and 1 may only name the reserved
    /// symbols.
    pub fn load<R: BufRead>(source: R) -> Result<Self> {
        let mut t = Self::new();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse("symbol table", lineno + 1, msg);
            let (symbol, id) = line
                .split_once('\t')
                .ok_or_else(|| err("expected symbol<TAB>id".into()))?;
            let id: Label = id
                .trim()
                .parse()
                .map_err(|_| err(format!("bad id {id:?}")))?;
            if symbol.is_empty() {
                return Err(err("empty symbol".into()));
            }
            match (t.by_symbol.get(symbol), t.by_label.get(&id)) {
                (Some(&l), _) if l == id => continue,
                (Some(_), _) => return Err(err(format!("symbol {symbol:?} already has an id"))),
                (None, Some(existing)) => {
                    return Err(err(format!("id {id} already names {existing:?}")))
                }
                (None, None) => t.insert(symbol, id),
            }
        }
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|(l, s)| format!("{s}\t{l}\n")).collect()
    }
}
