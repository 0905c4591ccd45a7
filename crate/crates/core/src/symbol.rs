use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Integer id of a symbol. Id 0 is always epsilon.
pub type Label = u32;

pub const EPS: Label = 0;
pub const EPS_NAME: &str = "<eps>";

/// Bijection between symbol names and dense integer ids, with id 0 reserved
/// for `<eps>`.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, Label>,
}

impl PartialEq for SymbolTable {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for SymbolTable {}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut ids = HashMap::new();
        ids.insert(EPS_NAME.to_string(), EPS);
        Self {
            names: vec![EPS_NAME.to_string()],
            ids,
        }
    }

    /// Builds a table holding `names` at ids 1, 2, ... in order.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = Self::new();
        for name in names {
            table.add_symbol(name.as_ref());
        }
        table
    }

    /// Returns the id of `name`, inserting it if absent.
    pub fn add_symbol(&mut self, name: &str) -> Label {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as Label;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn find(&self, name: &str) -> Option<Label> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, label: Label) -> Option<&str> {
        self.names.get(label as usize).map(String::as_str)
    }

    /// Name of `label`, or `#<id>` when out of range.
    pub fn display(&self, label: Label) -> String {
        self.name(label)
            .map(str::to_string)
            .unwrap_or_else(|| format!("#{label}"))
    }

    /// Number of entries, epsilon included.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when the table holds nothing but epsilon.
    pub fn is_empty(&self) -> bool {
        self.names.len() == 1
    }

    pub fn contains(&self, label: Label) -> bool {
        (label as usize) < self.names.len()
    }

    /// Non-epsilon labels in increasing order.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        1..self.names.len() as Label
    }

    /// Renders a word as space-separated names; the empty word renders as `<eps>`.
    pub fn format_word(&self, word: &[Label]) -> String {
        if word.is_empty() {
            return EPS_NAME.to_string();
        }
        word.iter()
            .map(|&l| self.display(l))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a word written as whitespace- or comma-separated names.
    /// `<eps>` and the empty string both denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Label>> {
        let mut out = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() || tok == EPS_NAME {
                continue;
            }
            let id = self.find(tok).ok_or_else(|| Error::UnknownSymbol {
                line: 0,
                name: tok.to_string(),
            })?;
            out.push(id);
        }
        Ok(out)
    }

    /// `name<TAB>id` per line, ordered by id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "{name}\t{id}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(Label, String, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `name<TAB>id`, got {} field(s)", fields.len()),
                });
            }
            let id: Label = fields[1].trim().parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad symbol id `{}`", fields[1]),
            })?;
            entries.push((id, fields[0].to_string(), line));
        }
        entries.sort();
        match entries.first() {
            Some((0, name, _)) if name == EPS_NAME => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "symbol table must map `<eps>` to 0".into(),
                })
            }
        }
        let mut table = Self::new();
        for (expected, (id, name, line)) in entries.into_iter().enumerate() {
            if id as usize != expected {
                return Err(Error::Parse {
                    line,
                    msg: format!("symbol ids must be dense from 0; expected {expected}, got {id}"),
                });
            }
            if id == 0 {
                continue;
            }
            if name == EPS_NAME || table.find(&name).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate symbol `{name}`"),
                });
            }
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::Parse {
                    line,
                    msg: format!("invalid symbol name `{name}`"),
                });
            }
            table.add_symbol(&name);
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_is_reserved() {
        let t = SymbolTable::from_names(["i1", "i2"]);
        assert_eq!(t.find("<eps>"), Some(0));
        assert_eq!(t.find("i1"), Some(1));
        assert_eq!(t.name(2), Some("i2"));
        assert_eq!(t.labels().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn text_round_trip() {
        let t = SymbolTable::from_names(["a", "b", "c"]);
        let back = SymbolTable::parse(&t.to_text()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn rejects_missing_epsilon_and_gaps() {
        assert!(SymbolTable::parse("a\t1\n").is_err());
        assert!(SymbolTable::parse("<eps>\t0\na\t2\n").is_err());
        assert!(SymbolTable::parse("<eps>\t0\na\t1\na\t2\n").is_err());
    }

    #[test]
    fn word_parsing() {
        let t = SymbolTable::from_names(["i1", "i2"]);
        assert_eq!(t.parse_word("i1 i2,i1").unwrap(), vec![1, 2, 1]);
        assert_eq!(t.parse_word("<eps>").unwrap(), Vec::<Label>::new());
        assert!(t.parse_word("i9").is_err());
        assert_eq!(t.format_word(&[2, 1]), "i2 i1");
    }
}
