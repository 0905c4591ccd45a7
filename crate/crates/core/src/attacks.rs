//! Builders for attack models.
//!
//! Every builder here returns a machine over a single alphabet, used for both
//! input and output. Single-state builders accept every input word, so they
//! satisfy the input-language assumptions against any plant whose output
//! (sensor side) or input (actuator side) language is the full `Σ*`; for
//! other plants restrict them with [`restrict_sensor`] / [`restrict_actuator`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::algebra::{compose, parallel_all};
use crate::automaton::{project_input, project_output};
use crate::error::{Error, Result};
use crate::fst::{Fst, StateId, Word};
use crate::ops::{remove_epsilon_moves, trim};
use crate::symbol::{Label, SymbolTable, EPS};

fn single_state(alphabet: &SymbolTable) -> Fst {
    let mut f = Fst::new(alphabet.clone(), alphabet.clone());
    f.set_final(0, true);
    f
}

fn check_subset(alphabet: &SymbolTable, set: &[Label], what: &str) -> Result<BTreeSet<Label>> {
    set.iter()
        .map(|&l| {
            if l == EPS || !alphabet.contains(l) {
                Err(Error::InvalidArgument(format!("{what}: label {l} not in alphabet")))
            } else {
                Ok(l)
            }
        })
        .collect()
}

/// Erases every symbol outside `keep`.
pub fn projection_attack(alphabet: &SymbolTable, keep: &[Label]) -> Result<Fst> {
    let keep = check_subset(alphabet, keep, "projection")?;
    let mut f = single_state(alphabet);
    for l in alphabet.labels() {
        f.add_transition(0, l, if keep.contains(&l) { l } else { EPS }, 0);
    }
    Ok(f)
}

/// May delete any symbol outside `protected`.
pub fn deletion_attack(alphabet: &SymbolTable, protected: &[Label]) -> Result<Fst> {
    let protected = check_subset(alphabet, protected, "deletion")?;
    let mut f = single_state(alphabet);
    for l in alphabet.labels() {
        f.add_transition(0, l, l, 0);
        if !protected.contains(&l) {
            f.add_transition(0, l, EPS, 0);
        }
    }
    Ok(f)
}

/// May insert any number of symbols from `injectable` anywhere.
pub fn injection_attack(alphabet: &SymbolTable, injectable: &[Label]) -> Result<Fst> {
    let injectable = check_subset(alphabet, injectable, "injection")?;
    let mut f = single_state(alphabet);
    for l in alphabet.labels() {
        f.add_transition(0, l, l, 0);
    }
    for &j in &injectable {
        f.add_transition(0, EPS, j, 0);
    }
    Ok(f)
}

/// May delete or insert symbols of `vulnerable`; other symbols pass through.
pub fn injection_removal_attack(alphabet: &SymbolTable, vulnerable: &[Label]) -> Result<Fst> {
    let vulnerable = check_subset(alphabet, vulnerable, "injection-removal")?;
    let mut f = single_state(alphabet);
    for l in alphabet.labels() {
        if vulnerable.contains(&l) {
            f.add_transition(0, l, EPS, 0);
            f.add_transition(0, EPS, l, 0);
        } else {
            f.add_transition(0, l, l, 0);
        }
    }
    Ok(f)
}

/// Maps each symbol to a nonempty set of replacements, `EPS` meaning removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementRule {
    map: BTreeMap<Label, BTreeSet<Label>>,
}

impl ReplacementRule {
    /// Checks that every non-epsilon symbol of `alphabet` has a nonempty
    /// image inside `alphabet ∪ {ε}`.
    pub fn new(alphabet: &SymbolTable, map: BTreeMap<Label, BTreeSet<Label>>) -> Result<Self> {
        for l in alphabet.labels() {
            match map.get(&l) {
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "replacement rule has no image for `{}`",
                        alphabet.display(l)
                    )))
                }
                Some(img) if img.is_empty() => {
                    return Err(Error::InvalidArgument(format!(
                        "replacement rule maps `{}` to the empty set",
                        alphabet.display(l)
                    )))
                }
                Some(img) => {
                    if let Some(bad) = img.iter().find(|&&x| !alphabet.contains(x)) {
                        return Err(Error::InvalidArgument(format!(
                            "replacement image {bad} not in alphabet"
                        )));
                    }
                }
            }
        }
        if let Some(&bad) = map.keys().find(|&&k| k == EPS || !alphabet.contains(k)) {
            return Err(Error::InvalidArgument(format!(
                "replacement rule domain holds invalid label {bad}"
            )));
        }
        Ok(Self { map })
    }

    /// Identity rule, with `overrides` replacing individual images.
    pub fn identity_with(
        alphabet: &SymbolTable,
        overrides: impl IntoIterator<Item = (Label, Vec<Label>)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Label, BTreeSet<Label>> =
            alphabet.labels().map(|l| (l, BTreeSet::from([l]))).collect();
        for (l, img) in overrides {
            map.insert(l, img.into_iter().collect());
        }
        Self::new(alphabet, map)
    }

    pub fn image(&self, l: Label) -> impl Iterator<Item = Label> + '_ {
        self.map.get(&l).into_iter().flatten().copied()
    }
}

pub fn replacement_removal_attack(alphabet: &SymbolTable, rule: &ReplacementRule) -> Fst {
    let mut f = single_state(alphabet);
    for l in alphabet.labels() {
        for x in rule.image(l) {
            f.add_transition(0, l, x, 0);
        }
    }
    f
}

/// One branch of the replay attack: copies the first `k` symbols and then
/// replays the recorded block cyclically, one recorded symbol per input symbol.
fn replay_branch(alphabet: &SymbolTable, k: usize) -> Fst {
    let labels: Vec<Label> = alphabet.labels().collect();
    let mut f = single_state(alphabet);
    let mut layer: Vec<(StateId, Word)> = vec![(0, Vec::new())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (s, w) in &layer {
            for &l in &labels {
                let n = f.add_state();
                f.set_final(n, true);
                f.add_transition(*s, l, l, n);
                let mut v = w.clone();
                v.push(l);
                next.push((n, v));
            }
        }
        layer = next;
    }
    for (leaf, record) in layer {
        // phase p state emits record[p] on the next input symbol
        let mut phase_states = vec![leaf];
        for _ in 1..k {
            let s = f.add_state();
            f.set_final(s, true);
            phase_states.push(s);
        }
        for p in 0..k {
            let next = phase_states[(p + 1) % k];
            for &l in &labels {
                f.add_transition(phase_states[p], l, record[p], next);
            }
        }
    }
    f
}

/// Finite-memory replay: parallel composition over `k = 1..=n` of branches
/// that record the first `k` symbols and replay them in place of the rest.
pub fn replay_attack(alphabet: &SymbolTable, n: usize) -> Result<Fst> {
    if n == 0 {
        return Err(Error::InvalidArgument("replay memory must be at least 1".into()));
    }
    let branches: Vec<Fst> = (1..=n).map(|k| replay_branch(alphabet, k)).collect();
    parallel_all(&branches)
}

pub const DISABLED: &str = "D";
pub const ENABLED: &str = "E";

/// Automaton over `{D, E}` deciding, symbol by symbol, whether the attack is
/// enabled (`E`) or disabled (`D`).
#[derive(Debug, Clone)]
pub struct FrequencyCounter {
    automaton: Fst,
    d: Option<Label>,
    e: Option<Label>,
}

impl FrequencyCounter {
    pub fn new(automaton: Fst) -> Result<Self> {
        automaton.require_automaton()?;
        automaton.validate()?;
        let syms = automaton.isyms();
        for (s, t) in automaton.arcs() {
            let name = syms.display(t.ilabel);
            if name != DISABLED && name != ENABLED {
                return Err(Error::InvalidArgument(format!(
                    "frequency counter label `{name}` on state {s} is neither D nor E"
                )));
            }
        }
        if let Some(s) = automaton.states().find(|&s| !automaton.is_final(s)) {
            return Err(Error::InvalidArgument(format!(
                "frequency counter state {s} is not final"
            )));
        }
        Ok(Self {
            d: syms.find(DISABLED),
            e: syms.find(ENABLED),
            automaton,
        })
    }

    /// Counter cycling through `pattern`, a string over `D` and `E`.
    /// `"DDE"` enables the attack on every third symbol.
    pub fn cycle(pattern: &str) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidArgument("empty counter pattern".into()));
        }
        let syms = SymbolTable::from_names([DISABLED, ENABLED]);
        let mut f = Fst::new(syms.clone(), syms.clone());
        f.add_states(pattern.len() - 1);
        for (i, c) in pattern.chars().enumerate() {
            let l = match c {
                'D' => 1,
                'E' => 2,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "counter pattern symbol `{other}` is neither D nor E"
                    )))
                }
            };
            f.set_final(i, true);
            f.add_transition(i, l, l, (i + 1) % pattern.len());
        }
        Self::new(f)
    }

    pub fn automaton(&self) -> &Fst {
        &self.automaton
    }
}

/// Restricts `attack` to the positions the counter enables.
///
/// Each input symbol consumed advances the counter by one step. On an `E`
/// step the attack transition is taken as is; on a `D` step its output is
/// replaced by its input. Epsilon-input transitions of the attack do not
/// advance the counter and may only emit while the current counter state has
/// an `E` step available.
pub fn frequency_constrain(attack: &Fst, counter: &FrequencyCounter) -> Result<Fst> {
    if attack.isyms() != attack.osyms() {
        return Err(Error::AlphabetMismatch(
            "frequency_constrain needs an attack over a single alphabet".into(),
        ));
    }
    let c = &counter.automaton;
    let mut out = Fst::empty_shell(attack.isyms().clone(), attack.osyms().clone());
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(c.start(), attack.start())];
    index.insert(pairs[0], out.add_state());
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let (cs, a) = pairs[n];
        out.set_final(n, c.is_final(cs) && attack.is_final(a));
        let enabled_here = c.transitions(cs).iter().any(|t| Some(t.ilabel) == counter.e);
        let mut arcs = Vec::new();
        for t in attack.transitions(a) {
            if t.ilabel == EPS {
                let o = if enabled_here { t.olabel } else { EPS };
                arcs.push((EPS, o, (cs, t.next)));
                continue;
            }
            for g in c.transitions(cs) {
                let o = if Some(g.ilabel) == counter.e {
                    t.olabel
                } else {
                    debug_assert_eq!(Some(g.ilabel), counter.d);
                    t.ilabel
                };
                arcs.push((t.ilabel, o, (g.next, t.next)));
            }
        }
        for (i, o, key) in arcs {
            let id = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                queue.push_back(pairs.len() - 1);
                out.add_state()
            });
            out.add_transition(n, i, o, id);
        }
    }
    Ok(remove_epsilon_moves(&out))
}

/// `Id(L_out(plant)) ∘ attack`: the sensor attack restricted to words the
/// plant can generate.
pub fn restrict_sensor(plant: &Fst, attack: &Fst) -> Result<Fst> {
    Ok(trim(&compose(&project_output(plant), attack)?))
}

/// `attack ∘ Id(L_in(plant))`: the actuator attack restricted to words the
/// plant accepts.
pub fn restrict_actuator(plant: &Fst, attack: &Fst) -> Result<Fst> {
    Ok(trim(&compose(attack, &project_input(plant))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apply::{apply, relation_equal_upto};
    use std::collections::BTreeSet;

    fn sigma() -> SymbolTable {
        SymbolTable::from_names(["i1", "i2", "i3"])
    }

    fn outs(f: &Fst, w: &[Label], bound: usize) -> BTreeSet<Word> {
        apply(f, w, bound).outputs
    }

    #[test]
    fn projection_examples() {
        let s = sigma();
        let p = projection_attack(&s, &[1]).unwrap();
        assert_eq!(outs(&p, &[1, 2, 1], 5), BTreeSet::from([vec![1, 1]]));
        let all = projection_attack(&s, &[1, 2, 3]).unwrap();
        assert!(relation_equal_upto(&all, &Fst::identity(&s), 3).unwrap().holds);
        let none = projection_attack(&s, &[]).unwrap();
        assert_eq!(outs(&none, &[2, 3], 5), BTreeSet::from([vec![]]));
    }

    #[test]
    fn deletion_examples() {
        let s = sigma();
        let d = deletion_attack(&s, &[]).unwrap();
        assert_eq!(outs(&d, &[1], 3), BTreeSet::from([vec![1], vec![]]));
        let d = deletion_attack(&s, &[1]).unwrap();
        assert_eq!(outs(&d, &[2, 1], 3), BTreeSet::from([vec![2, 1], vec![1]]));
        let d = deletion_attack(&s, &[1, 2, 3]).unwrap();
        assert!(relation_equal_upto(&d, &Fst::identity(&s), 3).unwrap().holds);
    }

    #[test]
    fn injection_examples() {
        let s = sigma();
        let inj = injection_attack(&s, &[3]).unwrap();
        assert_eq!(outs(&inj, &[], 2), BTreeSet::from([vec![], vec![3], vec![3, 3]]));
        let o = outs(&inj, &[1], 2);
        assert!(o.contains(&vec![3, 1]) && o.contains(&vec![1, 3]));
        let none = injection_attack(&s, &[]).unwrap();
        assert!(relation_equal_upto(&none, &Fst::identity(&s), 3).unwrap().holds);
    }

    #[test]
    fn replacement_examples() {
        let s = SymbolTable::from_names(["i1", "i2"]);
        let r = ReplacementRule::identity_with(&s, [(2, vec![1])]).unwrap();
        let f = replacement_removal_attack(&s, &r);
        assert_eq!(outs(&f, &[2, 2], 3), BTreeSet::from([vec![1, 1]]));
        let r = ReplacementRule::identity_with(&s, [(1, vec![EPS, 2])]).unwrap();
        let f = replacement_removal_attack(&s, &r);
        assert_eq!(outs(&f, &[1], 3), BTreeSet::from([vec![], vec![2]]));
        let id = ReplacementRule::identity_with(&s, []).unwrap();
        assert!(relation_equal_upto(&replacement_removal_attack(&s, &id), &Fst::identity(&s), 3)
            .unwrap()
            .holds);
        assert!(ReplacementRule::identity_with(&s, [(1, vec![])]).is_err());
    }

    #[test]
    fn injection_removal_examples() {
        let s = SymbolTable::from_names(["i1", "i2"]);
        let f = injection_removal_attack(&s, &[1]).unwrap();
        let o = outs(&f, &[1], 1);
        assert!(o.contains(&vec![]) && o.contains(&vec![1]));
        let o = outs(&f, &[2], 2);
        for w in [vec![1, 2], vec![2, 1], vec![2]] {
            assert!(o.contains(&w));
        }
        let id = injection_removal_attack(&s, &[]).unwrap();
        assert!(relation_equal_upto(&id, &Fst::identity(&s), 3).unwrap().holds);
    }

    #[test]
    fn replay_examples() {
        let s = SymbolTable::from_names(["i1", "i2"]);
        let r1 = replay_attack(&s, 1).unwrap();
        assert_eq!(outs(&r1, &[1, 2, 2], 3), BTreeSet::from([vec![1, 1, 1]]));
        let r2 = replay_attack(&s, 2).unwrap();
        assert_eq!(outs(&r2, &[1], 3), BTreeSet::from([vec![1]]));
        assert_eq!(
            outs(&r2, &[1, 2, 2], 3),
            BTreeSet::from([vec![1, 1, 1], vec![1, 2, 1]])
        );
        assert!(replay_attack(&s, 0).is_err());
    }

    #[test]
    fn frequency_counter_examples() {
        let s = SymbolTable::from_names(["i1", "i2"]);
        let del = deletion_attack(&s, &[]).unwrap();
        let every_third = FrequencyCounter::cycle("DDE").unwrap();
        let f = frequency_constrain(&del, &every_third).unwrap();
        assert_eq!(outs(&f, &[1, 1, 1], 3), BTreeSet::from([vec![1, 1, 1], vec![1, 1]]));
        let always = frequency_constrain(&del, &FrequencyCounter::cycle("E").unwrap()).unwrap();
        assert!(relation_equal_upto(&always, &del, 4).unwrap().holds);
        let never = frequency_constrain(&del, &FrequencyCounter::cycle("D").unwrap()).unwrap();
        assert!(relation_equal_upto(&never, &Fst::identity(&s), 4).unwrap().holds);
        assert!(FrequencyCounter::cycle("DX").is_err());
    }

    #[test]
    fn frequency_counter_rejects_foreign_labels() {
        let s = SymbolTable::from_names(["D", "X"]);
        let f = Fst::identity(&s);
        assert!(FrequencyCounter::new(f).is_err());
    }
}
