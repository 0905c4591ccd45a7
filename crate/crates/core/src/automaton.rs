//! Decision procedures on automata, i.e. identity-labeled machines.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Fst, StateId, Word};
use crate::ops::{epsilon_closure, remove_epsilon_moves, trim};
use crate::symbol::{Label, SymbolTable, EPS};
use crate::verdict::Verdict;

fn project(fst: &Fst, input_side: bool) -> Fst {
    let syms = if input_side { fst.isyms() } else { fst.osyms() };
    let mut out = Fst::empty_shell(syms.clone(), syms.clone());
    out.add_states(fst.num_states());
    out.set_start(fst.start());
    for s in fst.finals() {
        out.set_final(s, true);
    }
    for (s, t) in fst.arcs() {
        let l = if input_side { t.ilabel } else { t.olabel };
        out.add_transition(s, l, l, t.next);
    }
    remove_epsilon_moves(&out)
}

/// Automaton for the input language of `fst`.
pub fn project_input(fst: &Fst) -> Fst {
    project(fst, true)
}

/// Automaton for the output language of `fst`.
pub fn project_output(fst: &Fst) -> Fst {
    project(fst, false)
}

/// Result of the subset construction, keeping the subset behind each state.
#[derive(Debug, Clone)]
pub struct Dfa {
    pub fst: Fst,
    pub subsets: Vec<Vec<StateId>>,
}

impl Dfa {
    /// Successor of `s` on `l`, if defined.
    pub fn next(&self, s: StateId, l: Label) -> Option<StateId> {
        self.fst
            .transitions(s)
            .binary_search_by_key(&l, |t| t.ilabel)
            .ok()
            .map(|i| self.fst.transitions(s)[i].next)
    }
}

fn closure_of(fst: &Fst, set: &[StateId]) -> Vec<StateId> {
    let mut out: Vec<StateId> = set.iter().flat_map(|&s| epsilon_closure(fst, s)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Subset construction with `ε|ε` closure. The result is partial (no dead
/// state) and each state's transitions are sorted by label.
pub fn determinize_subsets(automaton: &Fst) -> Result<Dfa> {
    automaton.require_automaton()?;
    let a = automaton;
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets = Vec::new();
    let mut dfa = Fst::empty_shell(a.isyms().clone(), a.osyms().clone());
    let init = closure_of(a, &[a.start()]);
    index.insert(init.clone(), dfa.add_state());
    subsets.push(init);
    let mut queue = VecDeque::from([0usize]);
    while let Some(d) = queue.pop_front() {
        let subset = subsets[d].clone();
        dfa.set_final(d, subset.iter().any(|&s| a.is_final(s)));
        let mut by_label: Vec<(Label, StateId)> = subset
            .iter()
            .flat_map(|&s| a.transitions(s))
            .filter(|t| t.ilabel != EPS)
            .map(|t| (t.ilabel, t.next))
            .collect();
        by_label.sort_unstable();
        by_label.dedup();
        for group in by_label.chunk_by(|x, y| x.0 == y.0) {
            let l = group[0].0;
            let targets: Vec<StateId> = group.iter().map(|x| x.1).collect();
            let target = closure_of(a, &targets);
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = dfa.add_state();
                    index.insert(target.clone(), id);
                    subsets.push(target);
                    queue.push_back(id);
                    id
                }
            };
            dfa.add_transition(d, l, l, id);
        }
    }
    Ok(Dfa { fst: dfa, subsets })
}

/// Deterministic, epsilon-free automaton for the same language.
pub fn determinize(automaton: &Fst) -> Result<Fst> {
    Ok(determinize_subsets(automaton)?.fst)
}

/// Adds a non-final dead state so every state has a transition on every
/// symbol. Expects a deterministic automaton.
pub fn complete(dfa: &Fst) -> Fst {
    let mut out = dfa.clone();
    let labels: Vec<Label> = dfa.isyms().labels().collect();
    let dead = out.add_state();
    for s in out.states() {
        let present: BTreeSet<Label> = out.transitions(s).iter().map(|t| t.ilabel).collect();
        for &l in &labels {
            if !present.contains(&l) {
                out.add_transition(s, l, l, dead);
            }
        }
    }
    out.sort_dedup();
    out
}

/// Automaton for the complement language over the automaton's alphabet.
pub fn complement(automaton: &Fst) -> Result<Fst> {
    let mut c = complete(&determinize(automaton)?);
    for s in c.states() {
        let f = c.is_final(s);
        c.set_final(s, !f);
    }
    Ok(c)
}

fn require_same_alphabet(a: &Fst, b: &Fst, what: &str) -> Result<()> {
    a.require_automaton()?;
    b.require_automaton()?;
    if a.isyms() != b.isyms() {
        return Err(Error::AlphabetMismatch(format!("{what}: automata use different alphabets")));
    }
    Ok(())
}

/// Decides `L(a) ⊆ L(b)`. On failure the witness is the shortest word of
/// `L(a) \ L(b)`, lexicographically least among the shortest.
pub fn language_included(a: &Fst, b: &Fst) -> Result<Verdict> {
    require_same_alphabet(a, b, "language_included")?;
    let mut ea = remove_epsilon_moves(a);
    ea.sort_dedup();
    let db = determinize_subsets(b)?;
    let db_start = Some(db.fst.start());
    // product node: (state of a, state of det(b) or None for dead)
    let mut index: HashMap<(StateId, Option<StateId>), usize> = HashMap::new();
    let mut nodes = vec![(ea.start(), db_start)];
    let mut parent: Vec<Option<(usize, Label)>> = vec![None];
    index.insert((ea.start(), db_start), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let (qa, qb) = nodes[n];
        let b_accepts = qb.is_some_and(|q| db.fst.is_final(q));
        if ea.is_final(qa) && !b_accepts {
            let mut word = Vec::new();
            let mut cur = n;
            while let Some((p, l)) = parent[cur] {
                word.push(l);
                cur = p;
            }
            word.reverse();
            return Ok(Verdict::no_word(word));
        }
        for t in ea.transitions(qa) {
            let nb = qb.and_then(|q| db.next(q, t.ilabel));
            let key = (t.next, nb);
            if let Entry::Vacant(e) = index.entry(key) {
                e.insert(nodes.len());
                nodes.push(key);
                parent.push(Some((n, t.ilabel)));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(Verdict::yes())
}

/// Decides `L(a) = L(b)`; the witness lies in the symmetric difference.
pub fn language_equal(a: &Fst, b: &Fst) -> Result<Verdict> {
    let v = language_included(a, b)?;
    if !v.holds {
        return Ok(v);
    }
    language_included(b, a)
}

/// Word membership.
pub fn accepts(automaton: &Fst, word: &[Label]) -> bool {
    let mut cur = closure_of(automaton, &[automaton.start()]);
    for &l in word {
        let next: Vec<StateId> = cur
            .iter()
            .flat_map(|&s| automaton.transitions(s))
            .filter(|t| t.ilabel == l)
            .map(|t| t.next)
            .collect();
        cur = closure_of(automaton, &next);
        if cur.is_empty() {
            return false;
        }
    }
    cur.iter().any(|&s| automaton.is_final(s))
}

/// Words of the language with length at most `max_len`.
pub fn language_upto(automaton: &Fst, max_len: usize) -> Result<BTreeSet<Word>> {
    let dfa = trim(&determinize(automaton)?);
    let mut out = BTreeSet::new();
    let mut layer = vec![(dfa.start(), Vec::new())];
    for depth in 0..=max_len {
        let mut next = Vec::new();
        for (s, w) in layer {
            if dfa.is_final(s) {
                out.insert(w.clone());
            }
            if depth < max_len {
                for t in dfa.transitions(s) {
                    let mut v: Word = w.clone();
                    v.push(t.ilabel);
                    next.push((t.next, v));
                }
            }
        }
        layer = next;
    }
    Ok(out)
}

/// Product automaton for `L(a) ∩ L(b)`, trimmed.
pub fn intersect(a: &Fst, b: &Fst) -> Result<Fst> {
    require_same_alphabet(a, b, "intersect")?;
    let ea = remove_epsilon_moves(a);
    let eb = remove_epsilon_moves(b);
    let mut out = Fst::empty_shell(a.isyms().clone(), a.osyms().clone());
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(ea.start(), eb.start())];
    index.insert(pairs[0], out.add_state());
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let (p, q) = pairs[n];
        out.set_final(n, ea.is_final(p) && eb.is_final(q));
        for ta in ea.transitions(p) {
            for tb in eb.transitions(q).iter().filter(|t| t.ilabel == ta.ilabel) {
                let key = (ta.next, tb.next);
                let id = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    queue.push_back(pairs.len() - 1);
                    out.add_state()
                });
                out.add_transition(n, ta.ilabel, ta.ilabel, id);
            }
        }
    }
    Ok(trim(&out))
}

/// Automaton over `symbols` accepting exactly `words`.
pub fn from_words<'a, I>(symbols: &SymbolTable, words: I) -> Fst
where
    I: IntoIterator<Item = &'a Word>,
{
    let mut out = Fst::new(symbols.clone(), symbols.clone());
    let mut trie: HashMap<(StateId, Label), StateId> = HashMap::new();
    for w in words {
        let mut cur = 0;
        for &l in w {
            cur = match trie.get(&(cur, l)) {
                Some(&n) => n,
                None => {
                    let n = out.add_state();
                    out.add_transition(cur, l, l, n);
                    trie.insert((cur, l), n);
                    n
                }
            };
        }
        out.set_final(cur, true);
    }
    out
}

/// Prefix closure of a language: every state that can reach a final state
/// becomes final.
pub fn prefix_closure(automaton: &Fst) -> Fst {
    let mut t = trim(&remove_epsilon_moves(automaton));
    if t.finals().next().is_none() {
        return t;
    }
    for s in t.states() {
        t.set_final(s, true);
    }
    t
}
