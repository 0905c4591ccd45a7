//! Line-oriented text format.
//!
//! ```text
//! src<TAB>dst<TAB>ilabel<TAB>olabel
//! state
//! ```
//!
//! The source state of the first line is the initial state. Fields may also be
//! separated by runs of spaces.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fst::{Fst, StateId};
use crate::symbol::{Label, SymbolTable, EPS_NAME};

enum Line<'a> {
    Arc {
        src: StateId,
        dst: StateId,
        ilabel: &'a str,
        olabel: &'a str,
    },
    Final(StateId),
}

fn parse_state(tok: &str, line: usize) -> Result<StateId> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad state id `{tok}`"),
    })
}

fn tokenize(text: &str) -> Result<Vec<(usize, Line<'_>)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            [s] => out.push((line, Line::Final(parse_state(s, line)?))),
            [s, d, i, o] => out.push((
                line,
                Line::Arc {
                    src: parse_state(s, line)?,
                    dst: parse_state(d, line)?,
                    ilabel: i,
                    olabel: o,
                },
            )),
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 1 or 4 fields, got {}", other.len()),
                })
            }
        }
    }
    Ok(out)
}

/// Collects every non-epsilon label name appearing in `texts`, sorted.
pub fn collect_symbols<'a, I>(texts: I) -> Result<SymbolTable>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut names = BTreeSet::new();
    for text in texts {
        for (_, l) in tokenize(text)? {
            if let Line::Arc { ilabel, olabel, .. } = l {
                for n in [ilabel, olabel] {
                    if n != EPS_NAME {
                        names.insert(n.to_string());
                    }
                }
            }
        }
    }
    Ok(SymbolTable::from_names(names))
}

fn resolve(table: &SymbolTable, name: &str, line: usize) -> Result<Label> {
    table.find(name).ok_or_else(|| Error::UnknownSymbol {
        line,
        name: name.to_string(),
    })
}

/// Parses a machine. When a table is `None`, it is inferred from the labels
/// used on that side, with ids assigned in sorted name order.
pub fn read_fst(
    text: &str,
    isyms: Option<&SymbolTable>,
    osyms: Option<&SymbolTable>,
) -> Result<Fst> {
    let lines = tokenize(text)?;
    let start = match lines.first() {
        None => return Err(Error::NoInitialState),
        Some((_, Line::Arc { src, .. })) => *src,
        Some((_, Line::Final(s))) => *s,
    };
    let infer = |pick_input: bool| {
        let names: BTreeSet<&str> = lines
            .iter()
            .filter_map(|(_, l)| match l {
                Line::Arc { ilabel, olabel, .. } => {
                    Some(if pick_input { *ilabel } else { *olabel })
                }
                Line::Final(_) => None,
            })
            .filter(|n| *n != EPS_NAME)
            .collect();
        SymbolTable::from_names(names)
    };
    let isyms = isyms.cloned().unwrap_or_else(|| infer(true));
    let osyms = osyms.cloned().unwrap_or_else(|| infer(false));

    let max_state = lines
        .iter()
        .map(|(_, l)| match l {
            Line::Arc { src, dst, .. } => (*src).max(*dst),
            Line::Final(s) => *s,
        })
        .max()
        .unwrap_or(0);
    let mut fst = Fst::empty_shell(isyms, osyms);
    fst.add_states(max_state + 1);
    fst.set_start(start);
    let mut finals = HashSet::new();
    for (line, l) in &lines {
        match l {
            Line::Arc {
                src,
                dst,
                ilabel,
                olabel,
            } => {
                let i = resolve(fst.isyms(), ilabel, *line)?;
                let o = resolve(fst.osyms(), olabel, *line)?;
                fst.add_transition(*src, i, o, *dst);
            }
            Line::Final(s) => {
                if !finals.insert(*s) {
                    return Err(Error::DuplicateFinal {
                        line: *line,
                        state: *s,
                    });
                }
                fst.set_final(*s, true);
            }
        }
    }
    Ok(fst)
}

/// Writes the canonical form of `fst`: transition lines sorted by
/// `(src, ilabel, olabel, dst)` followed by final-state lines.
///
/// A machine whose canonical form has neither transitions nor final states
/// (the empty relation) is written as a single `ε|ε` self-loop on state 0, so
/// that the output parses back.
pub fn write_fst(fst: &Fst) -> String {
    let c = fst.canonicalize();
    let mut out = String::new();
    for s in c.states() {
        for t in c.transitions(s) {
            let _ = writeln!(
                out,
                "{s}\t{}\t{}\t{}",
                t.next,
                c.isyms().display(t.ilabel),
                c.osyms().display(t.olabel)
            );
        }
    }
    for s in c.finals() {
        let _ = writeln!(out, "{s}");
    }
    if out.is_empty() {
        out = format!("0\t0\t{EPS_NAME}\t{EPS_NAME}\n");
    }
    out
}

/// Graphviz rendering of the canonical form. Final states are double circles
/// and the initial state gets an incoming arrow.
pub fn to_dot(fst: &Fst) -> String {
    let c = fst.canonicalize();
    let mut out = String::from("digraph fst {\n  rankdir=LR;\n  __start [shape=point];\n");
    for s in c.states() {
        let shape = if c.is_final(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {s} [shape={shape}];");
    }
    let _ = writeln!(out, "  __start -> {};", c.start());
    for s in c.states() {
        for t in c.transitions(s) {
            let label = format!("{}|{}", c.isyms().display(t.ilabel), c.osyms().display(t.olabel));
            let _ = writeln!(out, "  {s} -> {} [label={label:?}];", t.next);
        }
    }
    out.push_str("}\n");
    out
}
