use std::collections::{HashMap, VecDeque};

use crate::error::{Result, Side};
use crate::fst::{Fst, StateId, Transition};
use crate::ops::trim;
use crate::symbol::EPS;

/// For each state of a composed machine, the pair of operand states it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionTrace {
    pub state_pairs: Vec<(StateId, StateId)>,
}

/// Serial composition: the result relates `I` to `O` when some `M` has
/// `(I, M)` in `a` and `(M, O)` in `b`.
pub fn compose(a: &Fst, b: &Fst) -> Result<Fst> {
    Ok(compose_traced(a, b)?.0)
}

pub fn compose_traced(a: &Fst, b: &Fst) -> Result<(Fst, CompositionTrace)> {
    a.require_chain(b, "compose")?;
    let mut bs = b.clone();
    bs.sort_dedup();
    let matching = |q: StateId, l| {
        let ts = bs.transitions(q);
        let lo = ts.partition_point(|t| t.ilabel < l);
        let hi = ts.partition_point(|t| t.ilabel <= l);
        &ts[lo..hi]
    };

    let mut out = Fst::empty_shell(a.isyms().clone(), b.osyms().clone());
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: (StateId, StateId),
                      out: &mut Fst,
                      pairs: &mut Vec<(StateId, StateId)>,
                      queue: &mut VecDeque<StateId>| {
        *index.entry(key).or_insert_with(|| {
            let id = out.add_state();
            pairs.push(key);
            queue.push_back(id);
            id
        })
    };
    intern((a.start(), b.start()), &mut out, &mut pairs, &mut queue);
    while let Some(n) = queue.pop_front() {
        let (p, q) = pairs[n];
        out.set_final(n, a.is_final(p) && b.is_final(q));
        let mut new_arcs = Vec::new();
        for ta in a.transitions(p) {
            if ta.olabel == EPS {
                new_arcs.push((ta.ilabel, EPS, (ta.next, q)));
            } else {
                for tb in matching(q, ta.olabel) {
                    new_arcs.push((ta.ilabel, tb.olabel, (ta.next, tb.next)));
                }
            }
        }
        for tb in matching(q, EPS) {
            new_arcs.push((EPS, tb.olabel, (p, tb.next)));
        }
        for (i, o, key) in new_arcs {
            let dst = intern(key, &mut out, &mut pairs, &mut queue);
            out.add_transition(n, i, o, dst);
        }
    }

    let acc = out.accessible();
    let coacc = out.coaccessible();
    if !coacc[out.start()] {
        let empty = trim(&out);
        let trace = CompositionTrace {
            state_pairs: vec![pairs[out.start()]],
        };
        return Ok((empty, trace));
    }
    let keep: Vec<bool> = acc.iter().zip(&coacc).map(|(x, y)| *x && *y).collect();
    let state_pairs = pairs
        .iter()
        .zip(&keep)
        .filter_map(|(p, k)| k.then_some(*p))
        .collect();
    Ok((out.retain_states(&keep), CompositionTrace { state_pairs }))
}

/// Swaps input and output on every transition; the result realizes the
/// inverse relation.
pub fn invert(a: &Fst) -> Fst {
    let mut out = a.clone();
    out.swap_sides();
    out
}

/// Union of relations through a fresh initial state with `ε|ε` moves to
/// both operands.
pub fn parallel(a: &Fst, b: &Fst) -> Result<Fst> {
    a.require_same(b, Side::Input, "parallel")?;
    a.require_same(b, Side::Output, "parallel")?;
    let mut out = Fst::new(a.isyms().clone(), a.osyms().clone());
    for m in [a, b] {
        let offset = out.add_states(m.num_states());
        for s in m.states() {
            out.set_final(offset + s, m.is_final(s));
            for t in m.transitions(s) {
                out.add_transition(offset + s, t.ilabel, t.olabel, offset + t.next);
            }
        }
        out.add_transition(0, EPS, EPS, offset + m.start());
    }
    Ok(out)
}

/// Parallel composition of many machines sharing alphabets.
pub fn parallel_all(machines: &[Fst]) -> Result<Fst> {
    let first = machines.first().ok_or_else(|| {
        crate::error::Error::InvalidArgument("parallel of zero machines".into())
    })?;
    let mut out = Fst::new(first.isyms().clone(), first.osyms().clone());
    for m in machines {
        first.require_same(m, Side::Input, "parallel")?;
        first.require_same(m, Side::Output, "parallel")?;
        let offset = out.add_states(m.num_states());
        for s in m.states() {
            out.set_final(offset + s, m.is_final(s));
            for t in m.transitions(s) {
                out.add_transition(offset + s, t.ilabel, t.olabel, offset + t.next);
            }
        }
        out.transitions_mut(0)
            .push(Transition::new(EPS, EPS, offset + m.start()));
    }
    Ok(out)
}
