use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Result, Side};
use crate::fst::{Fst, StateId, Word};
use crate::symbol::{Label, EPS};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ApplyResult {
    pub outputs: BTreeSet<Word>,
    /// Set when at least one output longer than the bound was dropped.
    pub truncated: bool,
}

/// Output words `O` with `(input, O)` in the relation and `|O| <= max_out_len`.
///
/// Runs over the product of `fst` with the chain reading `input`, restricted
/// to product nodes that can still reach acceptance, so `truncated` is only
/// raised for outputs that really belong to the relation.
pub fn apply(fst: &Fst, input: &[Label], max_out_len: usize) -> ApplyResult {
    let len = input.len();
    let width = len + 1;
    let node = |s: StateId, pos: usize| s * width + pos;
    let total = fst.num_states() * width;

    let step = |s: StateId, pos: usize| {
        fst.transitions(s).iter().filter_map(move |t| {
            if t.ilabel == EPS {
                Some((t, pos))
            } else if pos < len && input[pos] == t.ilabel {
                Some((t, pos + 1))
            } else {
                None
            }
        })
    };

    let mut reach = vec![false; total];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut stack = vec![(fst.start(), 0)];
    reach[node(fst.start(), 0)] = true;
    while let Some((s, pos)) = stack.pop() {
        for (t, np) in step(s, pos) {
            let n = node(t.next, np);
            rev[n].push(node(s, pos));
            if !reach[n] {
                reach[n] = true;
                stack.push((t.next, np));
            }
        }
    }
    let mut live = vec![false; total];
    let mut stack: Vec<usize> = fst
        .finals()
        .map(|f| node(f, len))
        .filter(|&n| reach[n])
        .collect();
    for &n in &stack {
        live[n] = true;
    }
    while let Some(n) = stack.pop() {
        for &p in &rev[n] {
            if !live[p] {
                live[p] = true;
                stack.push(p);
            }
        }
    }

    let mut result = ApplyResult::default();
    if !live[node(fst.start(), 0)] {
        return result;
    }
    let mut seen: HashSet<(StateId, usize, Word)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((fst.start(), 0, Vec::new()));
    queue.push_back((fst.start(), 0, Vec::new()));
    while let Some((s, pos, out)) = queue.pop_front() {
        if pos == len && fst.is_final(s) {
            result.outputs.insert(out.clone());
        }
        for (t, np) in step(s, pos) {
            if !live[node(t.next, np)] {
                continue;
            }
            let mut o = out.clone();
            if t.olabel != EPS {
                if o.len() == max_out_len {
                    result.truncated = true;
                    continue;
                }
                o.push(t.olabel);
            }
            let key = (t.next, np, o);
            if !seen.contains(&key) {
                seen.insert(key.clone());
                queue.push_back(key);
            }
        }
    }
    result
}

/// Membership of the pair `(input, output)` in the relation.
pub fn relation_contains(fst: &Fst, input: &[Label], output: &[Label]) -> bool {
    apply(fst, input, output.len()).outputs.contains(output)
}

/// All words over `labels` of length at most `max_len`, shortest first and
/// lexicographic within a length.
pub fn words_upto(labels: &[Label], max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * labels.len());
        for w in &layer {
            for &l in labels {
                let mut v: Word = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Tracks the states reachable after reading an input prefix, to prune
/// enumeration of inputs that no accepting path can read.
pub(crate) struct InputFrontier<'a> {
    fst: &'a Fst,
    live: Vec<bool>,
}

impl<'a> InputFrontier<'a> {
    pub(crate) fn new(fst: &'a Fst) -> Self {
        let live = fst.coaccessible();
        Self { fst, live }
    }

    fn close(&self, mut set: Vec<StateId>) -> Vec<StateId> {
        let mut seen: HashSet<StateId> = set.iter().copied().collect();
        let mut stack = set.clone();
        while let Some(s) = stack.pop() {
            for t in self.fst.transitions(s) {
                if t.ilabel == EPS && self.live[t.next] && seen.insert(t.next) {
                    set.push(t.next);
                    stack.push(t.next);
                }
            }
        }
        set.sort_unstable();
        set
    }

    pub(crate) fn initial(&self) -> Vec<StateId> {
        if self.live[self.fst.start()] {
            self.close(vec![self.fst.start()])
        } else {
            Vec::new()
        }
    }

    pub(crate) fn step(&self, set: &[StateId], l: Label) -> Vec<StateId> {
        let mut next: Vec<StateId> = set
            .iter()
            .flat_map(|&s| self.fst.transitions(s))
            .filter(|t| t.ilabel == l && self.live[t.next])
            .map(|t| t.next)
            .collect();
        next.sort_unstable();
        next.dedup();
        self.close(next)
    }
}

/// Inputs of length at most `max_len` that are prefixes of some word in the
/// input language of one of `machines`, shortest first.
pub(crate) fn live_inputs_upto(machines: &[&Fst], labels: &[Label], max_len: usize) -> Vec<Word> {
    let frontiers: Vec<InputFrontier> = machines.iter().map(|f| InputFrontier::new(f)).collect();
    let init: Vec<Vec<StateId>> = frontiers.iter().map(InputFrontier::initial).collect();
    let mut out = Vec::new();
    let mut layer = vec![(Vec::new(), init)];
    for depth in 0..=max_len {
        let mut next = Vec::new();
        for (w, sets) in layer {
            if sets.iter().all(Vec::is_empty) {
                continue;
            }
            if depth < max_len {
                for &l in labels {
                    let ns: Vec<Vec<StateId>> = frontiers
                        .iter()
                        .zip(&sets)
                        .map(|(f, s)| f.step(s, l))
                        .collect();
                    let mut v = w.clone();
                    v.push(l);
                    next.push((v, ns));
                }
            }
            out.push(w);
        }
        layer = next;
    }
    out
}

/// Bounded relation equality: compares `{(I, O) : |I|, |O| <= max_len}` for
/// both machines. The witness is the first pair (shortest input, then
/// smallest output) found in exactly one of them.
pub fn relation_equal_upto(a: &Fst, b: &Fst, max_len: usize) -> Result<Verdict> {
    a.require_same(b, Side::Input, "relation_equal_upto")?;
    a.require_same(b, Side::Output, "relation_equal_upto")?;
    let labels: Vec<Label> = a.isyms().labels().collect();
    for w in live_inputs_upto(&[a, b], &labels, max_len) {
        let ra = apply(a, &w, max_len).outputs;
        let rb = apply(b, &w, max_len).outputs;
        if ra != rb {
            let o = ra.symmetric_difference(&rb).next().cloned().unwrap_or_default();
            return Ok(Verdict::no(Witness::Pair(w, o)));
        }
    }
    Ok(Verdict::yes())
}
