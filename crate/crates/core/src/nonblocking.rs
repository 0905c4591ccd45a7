//! Subset construction over input/output pairs and the nonblocking check
//! for nondeterministic plants.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::algebra::compose;
use crate::automaton::{language_included, project_output};
use crate::error::{Error, Result};
use crate::fst::{Fst, StateId, Word};
use crate::ops::{epsilon_closure, remove_epsilon_moves, trim};
use crate::symbol::{Label, SymbolTable, EPS};

/// A transition label read as one atomic symbol.
pub type Pair = (Label, Label);

/// Deterministic machine over pairs; state `d` stands for `subsets[d]`, an
/// epsilon-closed set of states of the original machine.
#[derive(Debug, Clone)]
pub struct DeterminizedMachine {
    pub subsets: Vec<Vec<StateId>>,
    pub transitions: Vec<BTreeMap<Pair, StateId>>,
    pub finals: Vec<bool>,
}

impl DeterminizedMachine {
    pub const INITIAL: StateId = 0;

    pub fn next(&self, d: StateId, p: Pair) -> Option<StateId> {
        self.transitions[d].get(&p).copied()
    }

    pub fn num_states(&self) -> usize {
        self.subsets.len()
    }

    /// Follows a pair word from the initial state.
    pub fn run(&self, pairs: &[Pair]) -> Option<StateId> {
        pairs
            .iter()
            .try_fold(Self::INITIAL, |d, &p| self.next(d, p))
    }

    /// Pair alphabet actually used on transitions.
    pub fn pair_alphabet(&self) -> BTreeSet<Pair> {
        self.transitions
            .iter()
            .flat_map(|m| m.keys().copied())
            .collect()
    }
}

fn close(fst: &Fst, set: impl IntoIterator<Item = StateId>) -> Vec<StateId> {
    let mut out: Vec<StateId> = set
        .into_iter()
        .flat_map(|s| epsilon_closure(fst, s))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn successor(fst: &Fst, subset: &[StateId], p: Pair) -> Vec<StateId> {
    close(
        fst,
        subset
            .iter()
            .flat_map(|&s| fst.transitions(s))
            .filter(|t| (t.ilabel, t.olabel) == p)
            .map(|t| t.next)
            .collect::<Vec<_>>(),
    )
}

/// Powerset construction treating each non-`ε|ε` label as a symbol and
/// closing subsets under `ε|ε` moves.
pub fn determinize_pairs(fst: &Fst) -> DeterminizedMachine {
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let init = close(fst, [fst.start()]);
    let mut dm = DeterminizedMachine {
        subsets: vec![init.clone()],
        transitions: vec![BTreeMap::new()],
        finals: vec![false],
    };
    index.insert(init, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(d) = queue.pop_front() {
        let subset = dm.subsets[d].clone();
        dm.finals[d] = subset.iter().any(|&s| fst.is_final(s));
        let pairs: BTreeSet<Pair> = subset
            .iter()
            .flat_map(|&s| fst.transitions(s))
            .filter(|t| !t.is_epsilon())
            .map(|t| (t.ilabel, t.olabel))
            .collect();
        for p in pairs {
            let target = successor(fst, &subset, p);
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = dm.subsets.len();
                    index.insert(target.clone(), id);
                    dm.subsets.push(target);
                    dm.transitions.push(BTreeMap::new());
                    dm.finals.push(false);
                    queue.push_back(id);
                    id
                }
            };
            dm.transitions[d].insert(p, id);
        }
    }
    dm
}

/// A reachable subset transition on which some states of the source subset
/// cannot follow the label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Pair word leading to `subset`.
    pub path: Vec<Pair>,
    pub subset: Vec<StateId>,
    pub label: Pair,
    /// Successor subset built from the union over `subset`.
    pub union: Vec<StateId>,
    /// Intersection of the per-state successor subsets.
    pub intersection: Vec<StateId>,
}

impl Violation {
    /// Input and output words of `path` followed by `label`.
    pub fn witness(&self) -> (Word, Word) {
        let mut i = Vec::new();
        let mut o = Vec::new();
        for &(a, b) in self.path.iter().chain(std::iter::once(&self.label)) {
            if a != EPS {
                i.push(a);
            }
            if b != EPS {
                o.push(b);
            }
        }
        (i, o)
    }

    pub fn describe(&self, isyms: &SymbolTable, osyms: &SymbolTable) -> String {
        let pair = |p: &Pair| format!("{}:{}", isyms.display(p.0), osyms.display(p.1));
        let path: Vec<String> = self.path.iter().map(pair).collect();
        let path = if path.is_empty() { "<eps>".to_string() } else { path.join(" ") };
        format!(
            "after {path} the plant is in one of {:?}; label {} leads to {:?} but only {:?} is reachable from every state",
            self.subset,
            pair(&self.label),
            self.union,
            self.intersection
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonblockingReport {
    pub nonblocking: bool,
    pub violation: Option<Violation>,
}

/// Symbol table naming each pair `i:o`, for pair-language checks.
fn pair_symbols(machines: &[&Fst]) -> (SymbolTable, HashMap<Pair, Label>) {
    let mut pairs = BTreeSet::new();
    for m in machines {
        for (_, t) in m.arcs() {
            if !t.is_epsilon() {
                pairs.insert((t.ilabel, t.olabel));
            }
        }
    }
    let m0 = machines[0];
    let mut table = SymbolTable::new();
    let mut ids = HashMap::new();
    for p in pairs {
        let name = format!("{}:{}", m0.isyms().display(p.0), m0.osyms().display(p.1));
        ids.insert(p, table.add_symbol(&name));
    }
    (table, ids)
}

fn pair_automaton(fst: &Fst, table: &SymbolTable, ids: &HashMap<Pair, Label>) -> Fst {
    let mut out = Fst::new(table.clone(), table.clone());
    out.add_states(fst.num_states() - 1);
    out.set_start(fst.start());
    for s in fst.finals() {
        out.set_final(s, true);
    }
    for (s, t) in fst.arcs() {
        let l = if t.is_epsilon() { EPS } else { ids[&(t.ilabel, t.olabel)] };
        out.add_transition(s, l, l, t.next);
    }
    out
}

/// Pair-language containment of `relation` in `fst`.
pub fn pair_language_included(relation: &Fst, fst: &Fst) -> Result<crate::verdict::Verdict> {
    let (table, ids) = pair_symbols(&[fst, relation]);
    language_included(
        &pair_automaton(relation, &table, &ids),
        &pair_automaton(fst, &table, &ids),
    )
}

/// Checks that along every execution of `relation`, each label enabled at
/// some state of the current subset of `fst` is enabled at all of them.
pub fn check_nonblocking(fst: &Fst, relation: &Fst) -> Result<NonblockingReport> {
    if fst.isyms() != relation.isyms() || fst.osyms() != relation.osyms() {
        return Err(Error::AlphabetMismatch(
            "check_nonblocking: relation and machine use different alphabets".into(),
        ));
    }
    let (table, ids) = pair_symbols(&[fst, relation]);
    let v = language_included(
        &pair_automaton(relation, &table, &ids),
        &pair_automaton(fst, &table, &ids),
    )?;
    if let Some(w) = v.witness {
        return Err(Error::Precondition(format!(
            "relation is not contained in the machine: pair word `{}`",
            w.render(&table, &table)
        )));
    }
    let rel = trim(&remove_epsilon_moves(relation));
    let dm = determinize_pairs(fst);

    // product of the relation with the determinized machine
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut nodes = vec![(rel.start(), DeterminizedMachine::INITIAL)];
    let mut parent: Vec<Option<(usize, Pair)>> = vec![None];
    let mut edges: Vec<(usize, Pair, usize)> = Vec::new();
    index.insert(nodes[0], 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let (r, d) = nodes[n];
        for t in rel.transitions(r) {
            let p = (t.ilabel, t.olabel);
            let Some(nd) = dm.next(d, p) else { continue };
            let key = (t.next, nd);
            let m = *index.entry(key).or_insert_with(|| {
                nodes.push(key);
                parent.push(Some((n, p)));
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            edges.push((n, p, m));
        }
    }
    // keep product edges that lie on a path to a jointly accepting node
    let mut live: Vec<bool> = nodes
        .iter()
        .map(|&(r, d)| rel.is_final(r) && dm.finals[d])
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, _, b) in &edges {
            if live[b] && !live[a] {
                live[a] = true;
                changed = true;
            }
        }
    }

    let mut checked: BTreeSet<(StateId, Pair)> = BTreeSet::new();
    for &(a, p, b) in &edges {
        if !(live[a] && live[b]) {
            continue;
        }
        let d = nodes[a].1;
        if !checked.insert((d, p)) {
            continue;
        }
        let subset = &dm.subsets[d];
        let union = dm.subsets[dm.next(d, p).expect("edge exists")].clone();
        let mut inter: Option<BTreeSet<StateId>> = None;
        for &s in subset {
            let succ: BTreeSet<StateId> = successor(fst, &close(fst, [s]), p).into_iter().collect();
            inter = Some(match inter {
                None => succ,
                Some(acc) => acc.intersection(&succ).copied().collect(),
            });
        }
        let intersection: Vec<StateId> = inter.unwrap_or_default().into_iter().collect();
        if intersection != union {
            let mut path = Vec::new();
            let mut cur = a;
            while let Some((prev, q)) = parent[cur] {
                path.push(q);
                cur = prev;
            }
            path.reverse();
            return Ok(NonblockingReport {
                nonblocking: false,
                violation: Some(Violation {
                    path,
                    subset: subset.clone(),
                    label: p,
                    union,
                    intersection,
                }),
            });
        }
    }
    Ok(NonblockingReport {
        nonblocking: true,
        violation: None,
    })
}

/// Which attacks surround the plant in the closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    /// Checks `P ∘ A_s`.
    Sensor,
    /// Checks `A_a ∘ P`.
    Actuator,
    /// Checks `A_a ∘ P ∘ A_s`.
    Both,
}

/// The machine checked for a given mode.
pub fn loop_machine(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    actuator_attack: Option<&Fst>,
    mode: LoopMode,
) -> Result<Fst> {
    let missing = |what: &str| Error::InvalidArgument(format!("{what} attack required for this mode"));
    match mode {
        LoopMode::Sensor => compose(plant, sensor_attack.ok_or_else(|| missing("sensor"))?),
        LoopMode::Actuator => compose(actuator_attack.ok_or_else(|| missing("actuator"))?, plant),
        LoopMode::Both => compose(
            &compose(actuator_attack.ok_or_else(|| missing("actuator"))?, plant)?,
            sensor_attack.ok_or_else(|| missing("sensor"))?,
        ),
    }
}

/// Relation induced by the supervisor on the mode machine: the machine
/// restricted to inputs the supervisor can issue.
pub fn induced_relation(supervisor: &Fst, machine: &Fst) -> Result<Fst> {
    let commands = project_output(supervisor);
    compose(&commands, machine)
}

/// Nonblocking check of the closed loop for the given mode. `relation`
/// overrides the induced relation.
pub fn check_closed_loop_nonblocking(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    actuator_attack: Option<&Fst>,
    supervisor: &Fst,
    mode: LoopMode,
    relation: Option<&Fst>,
) -> Result<NonblockingReport> {
    let machine = loop_machine(plant, sensor_attack, actuator_attack, mode)?;
    let rel = match relation {
        Some(r) => r.clone(),
        None => induced_relation(supervisor, &machine)?,
    };
    check_nonblocking(&machine, &rel)
}
