//! AT&T-style text serialization.
//!
//! Arc lines are `src<TAB>dst<TAB>ilabel<TAB>olabel[<TAB>weight]`, final
//! lines `state[<TAB>weight]`. The source of the first line is the start
//! state. Labels are numeric unless symbol tables are supplied. State ids
//! are renumbered densely in order of first appearance on reading.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Arc, Label, StateId, SymbolTable, Wfst};
use crate::error::{Error, Result};

const WHAT: &str = "fst text";

impl Wfst {
    pub fn from_text(text: &str) -> Result<Wfst> {
        let numeric = |field: &str, line: usize| {
            field
                .parse::<Label>()
                .map_err(|_| Error::parse(WHAT, line, format!("bad label {field:?}")))
        };
        parse(text, numeric, numeric)
    }

    /// Input labels must exist in `isyms`; output symbols are added to
    /// `osyms` on first sight.
    pub fn from_text_with_symbols(
        text: &str,
        isyms: &SymbolTable,
        osyms: &mut SymbolTable,
    ) -> Result<Wfst> {
        let input = |field: &str, line: usize| {
            isyms
                .find(field)
                .ok_or_else(|| Error::parse(WHAT, line, format!("unknown input symbol {field:?}")))
        };
        let output = |field: &str, _line: usize| Ok(osyms.add(field));
        parse(text, input, output)
    }

    pub fn to_text(&self) -> String {
        self.write(|l| Ok(l.to_string()), |l| Ok(l.to_string()))
            .expect("numeric labels always render")
    }

    pub fn to_text_with_symbols(&self, isyms: &SymbolTable, osyms: &SymbolTable) -> Result<String> {
        let lookup = |table: &SymbolTable, l: Label| {
            table
                .symbol(l)
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidFst(format!("label {l} missing from symbol table")))
        };
        self.write(|l| lookup(isyms, l), |l| lookup(osyms, l))
    }

    fn write<I, O>(&self, mut isym: I, mut osym: O) -> Result<String>
    where
        I: FnMut(Label) -> Result<String>,
        O: FnMut(Label) -> Result<String>,
    {
        let mut out = String::new();
        let Some(start) = self.start() else {
            return Ok(out);
        };
        // a bare start cannot be named in this format; its language is empty
        if self.arcs(start).is_empty() && !self.is_final(start) {
            return Ok(out);
        }
        // Written ids follow first appearance and states are written in id
        // order, so reading the text back reproduces the same numbering.
        let mut ids: Vec<Option<StateId>> = vec![None; self.num_states()];
        let mut order: Vec<StateId> = Vec::new();
        fn assign(ids: &mut [Option<StateId>], order: &mut Vec<StateId>, s: StateId) -> StateId {
            *ids[s].get_or_insert_with(|| {
                order.push(s);
                order.len() - 1
            })
        }
        assign(&mut ids, &mut order, start);
        let mut rest = self.states();
        let mut k = 0;
        loop {
            if k == order.len() {
                // states the start cannot reach
                let Some(s) = rest.find(|&s| {
                    ids[s].is_none() && (!self.arcs(s).is_empty() || self.is_final(s))
                }) else {
                    break;
                };
                assign(&mut ids, &mut order, s);
            }
            let s = order[k];
            for a in self.arcs(s) {
                let dst = assign(&mut ids, &mut order, a.next);
                writeln!(out, "{k}\t{dst}\t{}\t{}\t{}", isym(a.ilabel)?, osym(a.olabel)?, a.weight).unwrap();
            }
            if let Some(w) = self.final_weight(s) {
                writeln!(out, "{k}\t{w}").unwrap();
            }
            k += 1;
        }
        Ok(out)
    }
}

fn parse<I, O>(text: &str, mut ilabel: I, mut olabel: O) -> Result<Wfst>
where
    I: FnMut(&str, usize) -> Result<Label>,
    O: FnMut(&str, usize) -> Result<Label>,
{
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    // State ids are renumbered densely in order of first appearance.
    let mut ids: HashMap<u64, StateId> = HashMap::new();
    let mut state = |fst: &mut Wfst, field: &str, line: usize| -> Result<StateId> {
        let raw: u64 = field
            .trim()
            .parse()
            .map_err(|_| Error::parse(WHAT, line, format!("bad state {field:?}")))?;
        Ok(*ids.entry(raw).or_insert_with(|| fst.add_state()))
    };
    let weight = |field: Option<&str>, line: usize| -> Result<f64> {
        let Some(field) = field else { return Ok(0.0) };
        let w: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::parse(WHAT, line, format!("bad weight {field:?}")))?;
        if !w.is_finite() {
            return Err(Error::parse(WHAT, line, "weight must be finite"));
        }
        Ok(w)
    };

    let mut fst = Wfst::new();
    for (idx, &(line, content)) in lines.iter().enumerate() {
        let fields: Vec<&str> = content.split('\t').collect();
        let src = state(&mut fst, fields[0], line)?;
        if idx == 0 {
            fst.set_start(src);
        }
        match fields.len() {
            1 | 2 => fst.set_final(src, weight(fields.get(1).copied(), line)?),
            3..=5 => {
                let dst = state(&mut fst, fields[1], line)?;
                let il = ilabel(fields[2], line)?;
                let (ol, w) = if fields.len() == 3 {
                    (olabel(fields[2], line)?, 0.0)
                } else {
                    (olabel(fields[3], line)?, weight(fields.get(4).copied(), line)?)
                };
                fst.add_arc(src, Arc::new(il, ol, w, dst));
            }
            n => return Err(Error::parse(WHAT, line, format!("{n} fields"))),
        }
    }
    Ok(fst)
}
