use std::collections::BTreeSet;

use crate::algebra::{compose, invert};
use crate::apply::apply;
use crate::automaton::{
    accepts, complete, determinize, language_included, language_upto,
    project_input, project_output,
};
use crate::error::{Error, Result};
use crate::fst::{Fst, Word};
use crate::ops::trim;
use crate::symbol::{Label, EPS};
use crate::verdict::{Verdict, Witness};

/// A prefix-closed regular language, stored as a trimmed DFA whose states
/// are all final.
#[derive(Debug, Clone)]
pub struct DesiredLanguage {
    dfa: Fst,
}

impl DesiredLanguage {
    pub fn new(automaton: &Fst) -> Result<Self> {
        let dfa = trim(&determinize(automaton)?);
        if dfa.finals().next().is_none() {
            return Ok(Self { dfa });
        }
        if let Some(word) = shortest_to_nonfinal(&dfa) {
            return Err(Error::NotPrefixClosed(dfa.isyms().format_word(&word)));
        }
        Ok(Self { dfa })
    }

    /// Identity automaton of the language.
    pub fn automaton(&self) -> &Fst {
        &self.dfa
    }

    pub fn contains(&self, word: &[Label]) -> bool {
        accepts(&self.dfa, word)
    }

    pub fn words_upto(&self, max_len: usize) -> BTreeSet<Word> {
        language_upto(&self.dfa, max_len).unwrap_or_default()
    }
}

fn shortest_to_nonfinal(dfa: &Fst) -> Option<Word> {
    let mut parent: Vec<Option<(usize, Label)>> = vec![None; dfa.num_states()];
    let mut seen = vec![false; dfa.num_states()];
    let mut queue = std::collections::VecDeque::from([dfa.start()]);
    seen[dfa.start()] = true;
    while let Some(s) = queue.pop_front() {
        if !dfa.is_final(s) {
            let mut w = Vec::new();
            let mut cur = s;
            while let Some((p, l)) = parent[cur] {
                w.push(l);
                cur = p;
            }
            w.reverse();
            return Some(w);
        }
        for t in dfa.transitions(s) {
            if !seen[t.next] {
                seen[t.next] = true;
                parent[t.next] = Some((s, t.ilabel));
                queue.push_back(t.next);
            }
        }
    }
    None
}

/// Machine mapping every input word to its longest prefix in `K`.
///
/// Built from the DFA of `K` completed with a sink: transitions that stay in
/// `K` copy their symbol, transitions into the sink and the sink loops erase
/// it. Requires `K ⊆ plant_input_language`.
pub fn filter(desired: &DesiredLanguage, plant_input_language: &Fst) -> Result<Fst> {
    let k = desired.automaton();
    let v = language_included(k, plant_input_language)?;
    if !v.holds {
        return Err(Error::Precondition(format!(
            "desired language is not contained in the plant input language; `{}` is not accepted by the plant",
            render(&v, k)
        )));
    }
    let completed = complete(k);
    let sink = completed.num_states() - 1;
    let mut out = Fst::new(k.isyms().clone(), k.osyms().clone());
    out.add_states(completed.num_states() - 1);
    out.set_start(completed.start());
    for s in completed.states() {
        out.set_final(s, true);
        for t in completed.transitions(s) {
            let o = if t.next == sink { EPS } else { t.ilabel };
            out.add_transition(s, t.ilabel, o, t.next);
        }
    }
    out.sort_dedup();
    Ok(out)
}

fn render(v: &Verdict, f: &Fst) -> String {
    v.witness
        .as_ref()
        .map(|w| w.render(f.isyms(), f.osyms()))
        .unwrap_or_default()
}

/// Which machine stands for the desired language inside a supervisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Identity automaton of `K`: commands outside `K` are never issued.
    #[default]
    Restrict,
    /// The longest-prefix [`filter`].
    PassThrough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SynthesisOptions {
    /// Leave the inverse plant out of the supervisor. Only meaningful when
    /// the plant is an identity machine whose input and output alphabets
    /// coincide.
    pub drop_plant_inverse: bool,
    pub filter_mode: FilterMode,
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub supervisor: Fst,
    pub controllable: bool,
    pub weakly_controllable: bool,
    /// The smallest language the closed loop can be confined to.
    pub minimal_superset: Fst,
    /// A word of the minimal superset outside `K`, when not controllable.
    pub witness: Option<Word>,
    /// Largest transition count among the machines built on the way.
    pub peak_transitions: usize,
}

fn language_model(desired: &DesiredLanguage, plant: &Fst, opts: &SynthesisOptions) -> Result<Fst> {
    match opts.filter_mode {
        FilterMode::Restrict => Ok(desired.automaton().clone()),
        FilterMode::PassThrough => filter(desired, &project_input(plant)),
    }
}

fn check_equal(left: &Fst, right: &Fst, what_left: &str, what_right: &str, name: &str) -> Result<()> {
    if left.isyms() != right.isyms() {
        return Err(Error::AlphabetMismatch(format!("{name}: {what_left} and {what_right} use different alphabets")));
    }
    let v = language_included(left, right)?;
    if !v.holds {
        return Err(Error::Precondition(format!(
            "{name}: `{}` is in {what_left} but not in {what_right}",
            render(&v, left)
        )));
    }
    let v = language_included(right, left)?;
    if !v.holds {
        return Err(Error::Precondition(format!(
            "{name}: `{}` is in {what_right} but not in {what_left}",
            render(&v, right)
        )));
    }
    Ok(())
}

/// The sensor attack accepts exactly the words the plant generates.
pub fn check_sensor_assumption(plant: &Fst, sensor_attack: &Fst) -> Result<()> {
    check_equal(
        &project_input(sensor_attack),
        &project_output(plant),
        "the sensor attack's input language",
        "the plant's output language",
        "sensor attack assumption",
    )
}

/// The actuator attack generates exactly the words the plant accepts.
pub fn check_actuator_assumption(plant: &Fst, actuator_attack: &Fst) -> Result<()> {
    check_equal(
        &project_output(actuator_attack),
        &project_input(plant),
        "the actuator attack's output language",
        "the plant's input language",
        "actuator attack assumption",
    )
}

fn check_desired(plant: &Fst, desired: &DesiredLanguage) -> Result<()> {
    let lin = project_input(plant);
    if lin.isyms() != desired.automaton().isyms() {
        return Err(Error::AlphabetMismatch(
            "desired language and plant input use different alphabets".into(),
        ));
    }
    let v = language_included(desired.automaton(), &lin)?;
    if !v.holds {
        return Err(Error::Precondition(format!(
            "desired word `{}` is not accepted by the plant",
            render(&v, &lin)
        )));
    }
    Ok(())
}

fn observer(plant: &Fst, sensor_attack: &Fst, opts: &SynthesisOptions) -> Result<Fst> {
    if opts.drop_plant_inverse {
        plant.require_automaton()?;
        Ok(invert(sensor_attack))
    } else {
        Ok(invert(&compose(plant, sensor_attack)?))
    }
}

/// Minimal superset `L_out(Id_K ∘ A_a⁻¹ ∘ A_a)` as a trimmed DFA, with the
/// controllability verdict `K̃ ⊆ K`.
fn actuator_superset(actuator_attack: &Fst, desired: &DesiredLanguage) -> Result<(Fst, Verdict, usize)> {
    let k = desired.automaton();
    let chain = compose(&compose(k, &invert(actuator_attack))?, actuator_attack)?;
    let superset = trim(&determinize(&project_output(&chain))?);
    let verdict = language_included(&superset, k)?;
    Ok((superset, verdict, chain.num_transitions()))
}

fn report(supervisor: Fst, superset: Fst, verdict: Verdict, peak: usize) -> SynthesisReport {
    let peak = peak.max(supervisor.num_transitions()).max(superset.num_transitions());
    SynthesisReport {
        peak_transitions: peak,
        supervisor: trim(&supervisor),
        controllable: verdict.holds,
        weakly_controllable: true,
        minimal_superset: superset,
        witness: verdict.witness.and_then(|w| w.as_word().cloned()),
    }
}

/// Supervisor `(P ∘ A_s)⁻¹ ∘ M_K` against sensor attacks. Always controllable.
pub fn synth_sensor(
    plant: &Fst,
    sensor_attack: &Fst,
    desired: &DesiredLanguage,
    opts: &SynthesisOptions,
) -> Result<SynthesisReport> {
    check_sensor_assumption(plant, sensor_attack)?;
    check_desired(plant, desired)?;
    let m = language_model(desired, plant, opts)?;
    let sup = compose(&observer(plant, sensor_attack, opts)?, &m)?;
    Ok(report(sup, desired.automaton().clone(), Verdict::yes(), 0))
}

/// Supervisor `P⁻¹ ∘ M_K ∘ A_a⁻¹` against actuator attacks.
pub fn synth_actuator(
    plant: &Fst,
    actuator_attack: &Fst,
    desired: &DesiredLanguage,
    opts: &SynthesisOptions,
) -> Result<SynthesisReport> {
    check_actuator_assumption(plant, actuator_attack)?;
    check_desired(plant, desired)?;
    let m = language_model(desired, plant, opts)?;
    let tail = compose(&m, &invert(actuator_attack))?;
    let tail_size = tail.num_transitions();
    let sup = if opts.drop_plant_inverse {
        plant.require_automaton()?;
        tail
    } else {
        compose(&invert(plant), &tail)?
    };
    let (superset, verdict, peak) = actuator_superset(actuator_attack, desired)?;
    Ok(report(sup, superset, verdict, peak.max(tail_size)))
}

/// Supervisor `(P ∘ A_s)⁻¹ ∘ M_K ∘ A_a⁻¹` against both attacks. The verdict
/// depends on the actuator attack only.
pub fn synth_both(
    plant: &Fst,
    actuator_attack: &Fst,
    sensor_attack: &Fst,
    desired: &DesiredLanguage,
    opts: &SynthesisOptions,
) -> Result<SynthesisReport> {
    check_sensor_assumption(plant, sensor_attack)?;
    check_actuator_assumption(plant, actuator_attack)?;
    check_desired(plant, desired)?;
    let m = language_model(desired, plant, opts)?;
    let tail = compose(&m, &invert(actuator_attack))?;
    let sup = compose(&observer(plant, sensor_attack, opts)?, &tail)?;
    let (superset, verdict, peak) = actuator_superset(actuator_attack, desired)?;
    Ok(report(sup, superset, verdict, peak.max(tail.num_transitions())))
}

/// Controllability when the actuator attack generates only part of the
/// plant's input language: `K̃ ⊆ K` and `K ⊆ L_out(A_a)`.
pub fn check_controllable_relaxed(
    actuator_attack: &Fst,
    plant: &Fst,
    desired: &DesiredLanguage,
) -> Result<Verdict> {
    let lout = project_output(actuator_attack);
    let v = language_included(&lout, &project_input(plant))?;
    if !v.holds {
        return Err(Error::Precondition(format!(
            "actuator attack emits `{}`, which the plant does not accept",
            render(&v, &lout)
        )));
    }
    let (_, v, _) = actuator_superset(actuator_attack, desired)?;
    if !v.holds {
        return Ok(v);
    }
    language_included(desired.automaton(), &lout)
}

/// The closed loop `P ∘ A_s ∘ S ∘ A_a` as one machine. Missing attacks are
/// taken as the identity.
pub fn closed_loop(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    supervisor: &Fst,
    actuator_attack: Option<&Fst>,
) -> Result<Fst> {
    let mut chain = plant.clone();
    if let Some(a) = sensor_attack {
        chain = compose(&chain, a)?;
    }
    chain = compose(&chain, supervisor)?;
    if let Some(a) = actuator_attack {
        chain = compose(&chain, a)?;
    }
    Ok(chain)
}

/// Automaton for the words the plant can be driven with in closed loop:
/// the output language of [`closed_loop`].
pub fn closed_loop_language(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    supervisor: &Fst,
    actuator_attack: Option<&Fst>,
) -> Result<Fst> {
    Ok(project_output(&closed_loop(
        plant,
        sensor_attack,
        supervisor,
        actuator_attack,
    )?))
}

/// Whether `word` can reach the plant in closed loop.
pub fn closed_loop_member(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    supervisor: &Fst,
    actuator_attack: Option<&Fst>,
    word: &[Label],
) -> Result<bool> {
    let chain = closed_loop(plant, sensor_attack, supervisor, actuator_attack)?;
    let acceptor = Fst::word_acceptor(chain.osyms(), word);
    let c = trim(&compose(&chain, &acceptor)?);
    let nonempty = c.finals().next().is_some();
    Ok(nonempty)
}

/// Stricter reading: `word` belongs when the closed loop relates it to
/// itself, i.e. the plant receives exactly the word it executed.
pub fn closed_loop_fixpoint_member(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    supervisor: &Fst,
    actuator_attack: Option<&Fst>,
    word: &[Label],
) -> Result<bool> {
    let chain = closed_loop(plant, sensor_attack, supervisor, actuator_attack)?;
    Ok(apply(&chain, word, word.len()).outputs.contains(word))
}

/// All closed-loop words of length at most `max_len`.
pub fn closed_loop_language_upto(
    plant: &Fst,
    sensor_attack: Option<&Fst>,
    supervisor: &Fst,
    actuator_attack: Option<&Fst>,
    max_len: usize,
) -> Result<BTreeSet<Word>> {
    let l = closed_loop_language(plant, sensor_attack, supervisor, actuator_attack)?;
    language_upto(&l, max_len)
}

/// Deterministic execution of a nondeterministic supervisor: among the
/// outputs of length at most `max_out_len`, the shortest, and among those
/// the lexicographically least.
pub fn execute_deterministic(supervisor: &Fst, observed: &[Label], max_out_len: usize) -> Option<Word> {
    apply(supervisor, observed, max_out_len)
        .outputs
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
}

impl SynthesisReport {
    pub fn witness_text(&self) -> Option<String> {
        self.witness
            .as_ref()
            .map(|w| Witness::Word(w.clone()).render(self.minimal_superset.isyms(), self.minimal_superset.osyms()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apply::relation_equal_upto;
    use crate::automaton::language_equal;
    use crate::samples::*;

    fn desired(f: &Fst) -> DesiredLanguage {
        DesiredLanguage::new(f).unwrap()
    }

    #[test]
    fn desired_must_be_prefix_closed() {
        let s = i12();
        let mut f = Fst::word_acceptor(&s, &[1, 2]);
        assert!(matches!(DesiredLanguage::new(&f), Err(Error::NotPrefixClosed(w)) if w == "<eps>"));
        for st in f.clone().states() {
            f.set_final(st, true);
        }
        assert!(DesiredLanguage::new(&f).is_ok());
    }

    #[test]
    fn filter_matches_longest_prefix_machine() {
        let k = desired(&input_desired_language());
        let f = filter(&k, &input_plant()).unwrap();
        assert!(relation_equal_upto(&f, &input_desired(), 4).unwrap().holds);
        assert_eq!(apply(&f, &[1, 1, 2], 3).outputs, BTreeSet::from([vec![1]]));
        assert_eq!(apply(&f, &[2, 2], 3).outputs, BTreeSet::from([vec![2, 2]]));
    }

    #[test]
    fn sensor_example() {
        let k = desired(&output_desired());
        let r = synth_sensor(&output_plant(), &output_attack_1(), &k, &SynthesisOptions::default()).unwrap();
        assert!(r.controllable);
        assert!(relation_equal_upto(&r.supervisor, &output_supervisor_1(), 6).unwrap().holds);
        let cl = closed_loop_language_upto(&output_plant(), Some(&output_attack_1()), &r.supervisor, None, 6).unwrap();
        assert_eq!(cl, k.words_upto(6));
    }

    #[test]
    fn actuator_example_attacker_1() {
        let k = desired(&input_desired_language());
        let r = synth_actuator(&input_plant(), &input_attack_1(), &k, &SynthesisOptions::default()).unwrap();
        assert!(r.controllable);
        assert!(r.witness.is_none());
        assert!(relation_equal_upto(&r.supervisor, &input_supervisor_1(), 5).unwrap().holds);
        let cl = closed_loop_language_upto(&input_plant(), None, &r.supervisor, Some(&input_attack_1()), 6).unwrap();
        assert_eq!(cl, k.words_upto(6));
        assert!(!closed_loop_member(&input_plant(), None, &r.supervisor, Some(&input_attack_1()), &[1, 1]).unwrap());
    }

    #[test]
    fn actuator_example_attacker_2() {
        let k = desired(&input_desired_language());
        let r = synth_actuator(&input_plant(), &input_attack_2(), &k, &SynthesisOptions::default()).unwrap();
        assert!(!r.controllable);
        assert!(r.weakly_controllable);
        assert_eq!(r.witness, Some(vec![1, 1]));
        assert!(language_equal(&r.minimal_superset, &input_superset_2()).unwrap().holds);
        let cl = closed_loop_language_upto(&input_plant(), None, &r.supervisor, Some(&input_attack_2()), 5).unwrap();
        assert_eq!(cl, language_upto(&input_superset_2(), 5).unwrap());
    }

    #[test]
    fn combined_examples() {
        let k = desired(&input_desired_language());
        let o = SynthesisOptions::default();
        let r = synth_both(&input_plant(), &input_attack_1(), &both_attack_1(), &k, &o).unwrap();
        assert!(r.controllable);
        assert!(relation_equal_upto(&r.supervisor, &both_supervisor_1(), 5).unwrap().holds);
        let r = synth_both(&input_plant(), &input_attack_2(), &both_attack_2(), &k, &o).unwrap();
        assert!(!r.controllable);
        assert!(language_equal(&r.minimal_superset, &input_superset_2()).unwrap().holds);
    }

    #[test]
    fn pass_through_mode_keeps_verdicts() {
        let k = desired(&input_desired_language());
        let o = SynthesisOptions { filter_mode: FilterMode::PassThrough, ..Default::default() };
        let r = synth_actuator(&input_plant(), &input_attack_1(), &k, &o).unwrap();
        assert!(r.controllable);
        let r = synth_actuator(&input_plant(), &input_attack_2(), &k, &o).unwrap();
        assert!(!r.controllable);
    }

    #[test]
    fn assumption_violation_names_direction() {
        let k = desired(&output_desired());
        let err = synth_sensor(&output_plant(), &input_attack_1(), &k, &SynthesisOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sensor attack assumption"), "{msg}");
    }

    #[test]
    fn relaxed_check() {
        let s = i12();
        let plant = Fst::identity(&s);
        let mut attack = Fst::new(s.clone(), s.clone());
        attack.set_final(0, true);
        attack.add_transition(0, 2, 2, 0);
        let k = desired(&build(&s, 3, None, &[(0, "i2", "i2", 1), (1, "i2", "i2", 2)]));
        assert!(check_controllable_relaxed(&attack, &plant, &k).unwrap().holds);
        let k = desired(&build(&s, 2, None, &[(0, "i1", "i1", 1)]));
        let v = check_controllable_relaxed(&attack, &plant, &k).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().as_word(), Some(&vec![1]));
    }

    #[test]
    fn deterministic_execution_picks_least() {
        let sup = both_supervisor_1();
        assert_eq!(execute_deterministic(&sup, &[], 3), Some(vec![]));
        assert_eq!(execute_deterministic(&sup, &[2], 3), Some(vec![1]));
    }
}
