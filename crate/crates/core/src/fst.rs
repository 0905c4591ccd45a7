use std::collections::VecDeque;

use crate::error::{Error, Result, Side};
use crate::symbol::{Label, SymbolTable, EPS};

pub type StateId = usize;

/// A finite sequence of non-epsilon symbol ids.
pub type Word = Vec<Label>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub ilabel: Label,
    pub olabel: Label,
    pub next: StateId,
}

impl Transition {
    pub fn new(ilabel: Label, olabel: Label, next: StateId) -> Self {
        Self {
            ilabel,
            olabel,
            next,
        }
    }

    /// An `ε|ε` move.
    pub fn is_epsilon(&self) -> bool {
        self.ilabel == EPS && self.olabel == EPS
    }
}

/// Normalized finite-state transducer: every transition carries at most one
/// input symbol and at most one output symbol.
///
/// An automaton is an `Fst` whose transitions all have `ilabel == olabel`
/// over identical input and output tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    start: StateId,
    finals: Vec<bool>,
    trans: Vec<Vec<Transition>>,
    isyms: SymbolTable,
    osyms: SymbolTable,
}

impl Fst {
    /// A machine with a single non-final initial state, i.e. the empty relation.
    pub fn new(isyms: SymbolTable, osyms: SymbolTable) -> Self {
        Self {
            start: 0,
            finals: vec![false],
            trans: vec![Vec::new()],
            isyms,
            osyms,
        }
    }

    /// Same as [`Fst::new`] but with zero states; callers must add the
    /// initial state themselves.
    pub(crate) fn empty_shell(isyms: SymbolTable, osyms: SymbolTable) -> Self {
        Self {
            start: 0,
            finals: Vec::new(),
            trans: Vec::new(),
            isyms,
            osyms,
        }
    }

    /// Single final state with an `a|a` loop for every symbol: the identity on `Σ*`.
    pub fn identity(symbols: &SymbolTable) -> Self {
        let mut fst = Self::new(symbols.clone(), symbols.clone());
        fst.set_final(0, true);
        for l in symbols.labels() {
            fst.add_transition(0, l, l, 0);
        }
        fst
    }

    /// Chain automaton accepting exactly `word`.
    pub fn word_acceptor(symbols: &SymbolTable, word: &[Label]) -> Self {
        let mut fst = Self::new(symbols.clone(), symbols.clone());
        let mut cur = 0;
        for &l in word {
            let next = fst.add_state();
            fst.add_transition(cur, l, l, next);
            cur = next;
        }
        fst.set_final(cur, true);
        fst
    }

    pub fn add_state(&mut self) -> StateId {
        self.finals.push(false);
        self.trans.push(Vec::new());
        self.finals.len() - 1
    }

    pub fn add_states(&mut self, n: usize) -> StateId {
        let first = self.finals.len();
        for _ in 0..n {
            self.add_state();
        }
        first
    }

    pub fn set_start(&mut self, s: StateId) {
        self.start = s;
    }

    pub fn set_final(&mut self, s: StateId, fin: bool) {
        self.finals[s] = fin;
    }

    pub fn add_transition(&mut self, src: StateId, ilabel: Label, olabel: Label, dst: StateId) {
        self.trans[src].push(Transition::new(ilabel, olabel, dst));
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter_map(|(s, &f)| f.then_some(s))
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn transitions(&self, s: StateId) -> &[Transition] {
        &self.trans[s]
    }

    /// All transitions as `(src, transition)` pairs.
    pub fn arcs(&self) -> impl Iterator<Item = (StateId, &Transition)> + '_ {
        self.trans
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |t| (s, t)))
    }

    pub fn isyms(&self) -> &SymbolTable {
        &self.isyms
    }

    pub fn osyms(&self) -> &SymbolTable {
        &self.osyms
    }

    pub(crate) fn transitions_mut(&mut self, s: StateId) -> &mut Vec<Transition> {
        &mut self.trans[s]
    }

    /// Swaps the tables and the labels of every transition.
    pub(crate) fn swap_sides(&mut self) {
        std::mem::swap(&mut self.isyms, &mut self.osyms);
        for ts in &mut self.trans {
            for t in ts.iter_mut() {
                std::mem::swap(&mut t.ilabel, &mut t.olabel);
            }
        }
    }

    /// Checks the structural invariants: state ids in range and labels
    /// present in the respective tables.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_states();
        if self.start >= n {
            return Err(Error::InvalidFst(format!(
                "initial state {} out of range ({} states)",
                self.start, n
            )));
        }
        for (s, t) in self.arcs() {
            if t.next >= n {
                return Err(Error::InvalidFst(format!(
                    "transition {s} -> {} targets a missing state",
                    t.next
                )));
            }
            if !self.isyms.contains(t.ilabel) {
                return Err(Error::InvalidFst(format!(
                    "input label {} on {s} -> {} not in input alphabet",
                    t.ilabel, t.next
                )));
            }
            if !self.osyms.contains(t.olabel) {
                return Err(Error::InvalidFst(format!(
                    "output label {} on {s} -> {} not in output alphabet",
                    t.olabel, t.next
                )));
            }
        }
        Ok(())
    }

    pub fn is_automaton(&self) -> bool {
        self.isyms == self.osyms && self.arcs().all(|(_, t)| t.ilabel == t.olabel)
    }

    /// Errors unless every transition is identity-labeled.
    pub fn require_automaton(&self) -> Result<()> {
        if self.isyms != self.osyms {
            return Err(Error::AlphabetMismatch(
                "automaton must share its input and output alphabets".into(),
            ));
        }
        if let Some((s, t)) = self.arcs().find(|(_, t)| t.ilabel != t.olabel) {
            return Err(Error::NotAnAutomaton {
                src: s,
                dst: t.next,
                ilabel: self.isyms.display(t.ilabel),
                olabel: self.osyms.display(t.olabel),
            });
        }
        Ok(())
    }

    pub fn has_epsilon_moves(&self) -> bool {
        self.arcs().any(|(_, t)| t.is_epsilon())
    }

    /// Deterministic in the input: no epsilon-input transitions and at most
    /// one transition per state and input symbol.
    pub fn is_input_deterministic(&self) -> bool {
        self.trans.iter().all(|ts| {
            let mut seen: Vec<Label> = Vec::with_capacity(ts.len());
            for t in ts {
                if t.ilabel == EPS || seen.contains(&t.ilabel) {
                    return false;
                }
                seen.push(t.ilabel);
            }
            true
        })
    }

    /// Reachability from the initial state.
    pub fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(s) = stack.pop() {
            for t in &self.trans[s] {
                if !seen[t.next] {
                    seen[t.next] = true;
                    stack.push(t.next);
                }
            }
        }
        seen
    }

    /// Co-reachability of a final state.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, t) in self.arcs() {
            rev[t.next].push(s);
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<StateId> = self.finals().collect();
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Keeps only the states flagged in `keep`, renumbered in increasing
    /// order. The initial state must be kept.
    pub(crate) fn retain_states(&self, keep: &[bool]) -> Fst {
        let mut map = vec![usize::MAX; self.num_states()];
        let mut out = Fst::empty_shell(self.isyms.clone(), self.osyms.clone());
        for s in self.states() {
            if keep[s] {
                map[s] = out.add_state();
                out.set_final(map[s], self.finals[s]);
            }
        }
        out.start = map[self.start];
        for s in self.states() {
            if !keep[s] {
                continue;
            }
            for t in &self.trans[s] {
                if keep[t.next] {
                    out.add_transition(map[s], t.ilabel, t.olabel, map[t.next]);
                }
            }
        }
        out
    }

    /// Sorts each state's transitions and removes duplicates.
    pub fn sort_dedup(&mut self) {
        for ts in &mut self.trans {
            ts.sort_unstable();
            ts.dedup();
        }
    }

    /// Canonical form: unreachable states dropped, states renumbered in BFS
    /// order from the initial state (transitions visited in label order),
    /// transitions sorted and deduplicated, `ε|ε` self-loops removed.
    pub fn canonicalize(&self) -> Fst {
        let n = self.num_states();
        let mut sorted: Vec<Vec<Transition>> = self.trans.clone();
        for (s, ts) in sorted.iter_mut().enumerate() {
            ts.retain(|t| !(t.is_epsilon() && t.next == s));
            ts.sort_unstable();
            ts.dedup();
        }
        let mut map = vec![usize::MAX; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        map[self.start] = 0;
        order.push(self.start);
        queue.push_back(self.start);
        while let Some(s) = queue.pop_front() {
            for t in &sorted[s] {
                if map[t.next] == usize::MAX {
                    map[t.next] = order.len();
                    order.push(t.next);
                    queue.push_back(t.next);
                }
            }
        }
        let mut out = Fst::empty_shell(self.isyms.clone(), self.osyms.clone());
        for &old in &order {
            let s = out.add_state();
            out.finals[s] = self.finals[old];
        }
        for (new, &old) in order.iter().enumerate() {
            out.trans[new] = sorted[old]
                .iter()
                .map(|t| Transition::new(t.ilabel, t.olabel, map[t.next]))
                .collect();
            out.trans[new].sort_unstable();
        }
        out
    }

    /// Errors unless `self.osyms == other.isyms`.
    pub(crate) fn require_chain(&self, other: &Fst, what: &str) -> Result<()> {
        if self.osyms != other.isyms {
            return Err(Error::AlphabetMismatch(format!(
                "{what}: output alphabet of the left machine differs from input alphabet of the right"
            )));
        }
        Ok(())
    }

    pub(crate) fn require_same(&self, other: &Fst, side: Side, what: &str) -> Result<()> {
        let (a, b) = match side {
            Side::Input => (&self.isyms, &other.isyms),
            Side::Output => (&self.osyms, &other.osyms),
        };
        if a != b {
            return Err(Error::AlphabetMismatch(format!(
                "{what}: {side} alphabets differ"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms() -> SymbolTable {
        SymbolTable::from_names(["a", "b"])
    }

    #[test]
    fn new_is_empty_relation() {
        let f = Fst::new(syms(), syms());
        assert_eq!(f.num_states(), 1);
        assert_eq!(f.finals().count(), 0);
        f.validate().unwrap();
    }

    #[test]
    fn validate_catches_bad_labels_and_states() {
        let mut f = Fst::new(syms(), syms());
        f.add_transition(0, 7, 1, 0);
        assert!(f.validate().is_err());
        let mut g = Fst::new(syms(), syms());
        g.add_transition(0, 1, 1, 3);
        assert!(g.validate().is_err());
    }

    #[test]
    fn canonicalize_drops_unreachable_and_is_idempotent() {
        let mut f = Fst::new(syms(), syms());
        let s1 = f.add_state();
        let s2 = f.add_state();
        let s3 = f.add_state();
        f.set_start(s2);
        f.add_transition(s2, 2, 2, s1);
        f.add_transition(s2, 1, 1, s1);
        f.add_transition(s2, 1, 1, s1);
        f.add_transition(s3, 1, 1, s2);
        f.set_final(s1, true);
        let c = f.canonicalize();
        assert_eq!(c.num_states(), 2);
        assert_eq!(c.start(), 0);
        assert_eq!(c.num_transitions(), 2);
        assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn automaton_checks() {
        let id = Fst::identity(&syms());
        assert!(id.is_automaton());
        assert!(id.is_input_deterministic());
        let mut f = Fst::new(syms(), syms());
        f.add_transition(0, 1, 2, 0);
        assert!(!f.is_automaton());
        assert!(f.require_automaton().is_err());
    }
}
