use crate::error::{Error, Result};
use crate::fst::{Fst, StateId, Transition};
use crate::symbol::{Label, SymbolTable, EPS};

/// Transducer whose transitions carry input and output words rather than
/// single symbols.
#[derive(Debug, Clone)]
pub struct WordFst {
    pub num_states: usize,
    pub start: StateId,
    pub finals: Vec<StateId>,
    pub arcs: Vec<WordArc>,
    pub isyms: SymbolTable,
    pub osyms: SymbolTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordArc {
    pub src: StateId,
    pub input: Vec<Label>,
    pub output: Vec<Label>,
    pub dst: StateId,
}

impl WordArc {
    pub fn new(src: StateId, input: Vec<Label>, output: Vec<Label>, dst: StateId) -> Self {
        Self {
            src,
            input,
            output,
            dst,
        }
    }
}

impl From<&Fst> for WordFst {
    fn from(f: &Fst) -> Self {
        let word = |l: Label| if l == EPS { vec![] } else { vec![l] };
        WordFst {
            num_states: f.num_states(),
            start: f.start(),
            finals: f.finals().collect(),
            arcs: f
                .arcs()
                .map(|(s, t)| WordArc::new(s, word(t.ilabel), word(t.olabel), t.next))
                .collect(),
            isyms: f.isyms().clone(),
            osyms: f.osyms().clone(),
        }
    }
}

/// Splits every word-labeled transition into a chain of single-symbol links.
///
/// Output symbols are placed as early as possible: link `k` carries the
/// `k`-th input symbol (or ε) and the `k`-th output symbol (or ε). A
/// transition with two empty words becomes one `ε|ε` move.
pub fn normalize(w: &WordFst) -> Result<Fst> {
    let mut fst = Fst::empty_shell(w.isyms.clone(), w.osyms.clone());
    fst.add_states(w.num_states);
    if w.start >= w.num_states {
        return Err(Error::InvalidFst(format!(
            "initial state {} out of range",
            w.start
        )));
    }
    fst.set_start(w.start);
    for &f in &w.finals {
        if f >= w.num_states {
            return Err(Error::InvalidFst(format!("final state {f} out of range")));
        }
        fst.set_final(f, true);
    }
    for arc in &w.arcs {
        if arc.src >= w.num_states || arc.dst >= w.num_states {
            return Err(Error::InvalidFst(format!(
                "transition {} -> {} out of range",
                arc.src, arc.dst
            )));
        }
        if arc.input.contains(&EPS) || arc.output.contains(&EPS) {
            return Err(Error::InvalidFst(
                "word labels must not contain epsilon".into(),
            ));
        }
        let len = arc.input.len().max(arc.output.len()).max(1);
        let mut cur = arc.src;
        for k in 0..len {
            let next = if k + 1 == len { arc.dst } else { fst.add_state() };
            let i = arc.input.get(k).copied().unwrap_or(EPS);
            let o = arc.output.get(k).copied().unwrap_or(EPS);
            fst.add_transition(cur, i, o, next);
            cur = next;
        }
    }
    fst.validate()?;
    Ok(fst)
}

/// Removes states that are unreachable from the initial state or cannot
/// reach a final state. If the initial state cannot reach a final state the
/// result is the empty relation: one non-final state and no transitions.
pub fn trim(fst: &Fst) -> Fst {
    let acc = fst.accessible();
    let coacc = fst.coaccessible();
    if !coacc[fst.start()] {
        return Fst::new(fst.isyms().clone(), fst.osyms().clone());
    }
    let keep: Vec<bool> = acc.iter().zip(&coacc).map(|(a, c)| *a && *c).collect();
    fst.retain_states(&keep)
}

/// States reachable from `s` through `ε|ε` moves, `s` included, sorted.
pub fn epsilon_closure(fst: &Fst, s: StateId) -> Vec<StateId> {
    let mut seen = vec![false; fst.num_states()];
    let mut stack = vec![s];
    seen[s] = true;
    let mut out = Vec::new();
    while let Some(q) = stack.pop() {
        out.push(q);
        for t in fst.transitions(q) {
            if t.is_epsilon() && !seen[t.next] {
                seen[t.next] = true;
                stack.push(t.next);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Eliminates `ε|ε` moves: each state receives the non-`ε|ε` transitions of
/// its closure and becomes final if its closure holds a final state. The
/// result is trimmed.
pub fn remove_epsilon_moves(fst: &Fst) -> Fst {
    if !fst.has_epsilon_moves() {
        return trim(fst);
    }
    let mut out = fst.clone();
    for s in fst.states() {
        let closure = epsilon_closure(fst, s);
        let mut ts: Vec<Transition> = closure
            .iter()
            .flat_map(|&q| fst.transitions(q).iter().copied())
            .filter(|t| !t.is_epsilon())
            .collect();
        ts.sort_unstable();
        ts.dedup();
        *out.transitions_mut(s) = ts;
        out.set_final(s, closure.iter().any(|&q| fst.is_final(q)));
    }
    trim(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apply::apply;

    fn syms() -> SymbolTable {
        SymbolTable::from_names(["i1", "i2", "o1", "o2"])
    }

    #[test]
    fn normalize_places_output_first() {
        let w = WordFst {
            num_states: 2,
            start: 0,
            finals: vec![1],
            arcs: vec![WordArc::new(0, vec![1, 2], vec![3], 1)],
            isyms: syms(),
            osyms: syms(),
        };
        let f = normalize(&w).unwrap();
        assert_eq!(f.num_states(), 3);
        assert_eq!(f.transitions(0), &[Transition::new(1, 3, 2)]);
        assert_eq!(f.transitions(2), &[Transition::new(2, EPS, 1)]);
    }

    #[test]
    fn normalize_output_only_chain() {
        let w = WordFst {
            num_states: 2,
            start: 0,
            finals: vec![1],
            arcs: vec![WordArc::new(0, vec![], vec![3, 4], 1)],
            isyms: syms(),
            osyms: syms(),
        };
        let f = normalize(&w).unwrap();
        assert_eq!(f.transitions(0), &[Transition::new(EPS, 3, 2)]);
        assert_eq!(f.transitions(2), &[Transition::new(EPS, 4, 1)]);
    }

    #[test]
    fn normalize_of_normalized_is_identity() {
        let mut f = Fst::new(syms(), syms());
        let s1 = f.add_state();
        f.add_transition(0, 1, EPS, s1);
        f.add_transition(s1, EPS, 3, 0);
        f.set_final(s1, true);
        assert_eq!(normalize(&WordFst::from(&f)).unwrap(), f);
    }

    #[test]
    fn trim_cases() {
        let mut f = Fst::new(syms(), syms());
        let s1 = f.add_state();
        let dead = f.add_state();
        let unreachable = f.add_state();
        f.add_transition(0, 1, 1, s1);
        f.add_transition(0, 2, 2, dead);
        f.add_transition(unreachable, 1, 1, s1);
        f.set_final(s1, true);
        let t = trim(&f);
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.num_transitions(), 1);

        let mut e = Fst::new(syms(), syms());
        let x = e.add_state();
        e.add_transition(0, 1, 1, x);
        let t = trim(&e);
        assert_eq!(t.num_states(), 1);
        assert_eq!(t.num_transitions(), 0);
        assert!(!t.is_final(0));
    }

    #[test]
    fn epsilon_removal_keeps_relation() {
        let mut f = Fst::new(syms(), syms());
        let a = f.add_state();
        let b = f.add_state();
        f.add_transition(0, EPS, EPS, a);
        f.add_transition(a, 1, 3, b);
        f.add_transition(b, EPS, EPS, 0);
        f.set_final(b, true);
        let g = remove_epsilon_moves(&f);
        assert!(!g.has_epsilon_moves());
        for w in [vec![], vec![1], vec![1, 1]] {
            assert_eq!(apply(&f, &w, 4).outputs, apply(&g, &w, 4).outputs);
        }
    }
}
