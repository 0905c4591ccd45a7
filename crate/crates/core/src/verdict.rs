use std::fmt;

use crate::fst::Word;
use crate::symbol::SymbolTable;

/// Counterexample attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Word(Word),
    /// An input/output pair.
    Pair(Word, Word),
}

impl Witness {
    pub fn render(&self, isyms: &SymbolTable, osyms: &SymbolTable) -> String {
        match self {
            Witness::Word(w) => isyms.format_word(w),
            Witness::Pair(i, o) => {
                format!("({}, {})", isyms.format_word(i), osyms.format_word(o))
            }
        }
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Witness::Word(w) => Some(w),
            Witness::Pair(..) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn yes() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    pub fn no(witness: Witness) -> Self {
        Self {
            holds: false,
            witness: Some(witness),
        }
    }

    pub fn no_word(w: Word) -> Self {
        Self::no(Witness::Word(w))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.holds { "holds" } else { "fails" })
    }
}
