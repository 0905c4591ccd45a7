//! Random machines and synthesis instances for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::compose;
use crate::attacks::{
    deletion_attack, injection_attack, injection_removal_attack, projection_attack,
    replacement_removal_attack, restrict_actuator, restrict_sensor, ReplacementRule,
};
use crate::automaton::{intersect, project_input};
use crate::fst::Fst;
use crate::ops::{WordArc, WordFst};
use crate::symbol::{Label, SymbolTable, EPS};
use crate::synthesis::{check_actuator_assumption, check_sensor_assumption, DesiredLanguage};

fn labels(syms: &SymbolTable) -> Vec<Label> {
    syms.labels().collect()
}

fn random_subset<R: Rng>(rng: &mut R, pool: &[Label]) -> Vec<Label> {
    pool.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random normalized machine with up to `max_states` states. Labels are
/// epsilon with probability `eps` on each side independently; `ε|ε` moves
/// are never produced.
pub fn random_fst<R: Rng>(rng: &mut R, syms: &SymbolTable, max_states: usize, eps: f64) -> Fst {
    let ls = labels(syms);
    let n = rng.gen_range(1..=max_states);
    let mut f = Fst::new(syms.clone(), syms.clone());
    f.add_states(n - 1);
    for s in 0..n {
        f.set_final(s, rng.gen_bool(0.5));
    }
    let arcs = rng.gen_range(0..=2 * n + 1);
    for _ in 0..arcs {
        let src = rng.gen_range(0..n);
        let dst = rng.gen_range(0..n);
        let mut i = if rng.gen_bool(eps) { EPS } else { *ls.choose(rng).unwrap() };
        let o = if rng.gen_bool(eps) { EPS } else { *ls.choose(rng).unwrap() };
        if i == EPS && o == EPS {
            i = *ls.choose(rng).unwrap();
        }
        f.add_transition(src, i, o, dst);
    }
    f
}

/// Random identity-labeled automaton, possibly nondeterministic.
pub fn random_automaton<R: Rng>(rng: &mut R, syms: &SymbolTable, max_states: usize) -> Fst {
    let ls = labels(syms);
    let n = rng.gen_range(1..=max_states);
    let mut f = Fst::new(syms.clone(), syms.clone());
    f.add_states(n - 1);
    for s in 0..n {
        f.set_final(s, rng.gen_bool(0.5));
    }
    for _ in 0..rng.gen_range(0..=2 * n + 1) {
        let l = *ls.choose(rng).unwrap();
        f.add_transition(rng.gen_range(0..n), l, l, rng.gen_range(0..n));
    }
    f
}

/// Random partial DFA with every state final: a prefix-closed language.
pub fn random_prefix_closed<R: Rng>(rng: &mut R, syms: &SymbolTable, max_states: usize) -> Fst {
    let n = rng.gen_range(1..=max_states);
    prefix_closed_with_states(rng, syms, n)
}

/// Like [`random_prefix_closed`] with exactly `n` states before trimming.
pub fn prefix_closed_with_states<R: Rng>(rng: &mut R, syms: &SymbolTable, n: usize) -> Fst {
    let mut f = Fst::new(syms.clone(), syms.clone());
    f.add_states(n - 1);
    for s in 0..n {
        f.set_final(s, true);
        for l in syms.labels() {
            if rng.gen_bool(0.6) {
                f.add_transition(s, l, l, rng.gen_range(0..n));
            }
        }
    }
    f
}

/// Input-deterministic plant with every state final and random outputs.
pub fn random_plant<R: Rng>(rng: &mut R, syms: &SymbolTable, max_states: usize) -> Fst {
    let ls = labels(syms);
    let n = rng.gen_range(1..=max_states);
    let mut f = Fst::new(syms.clone(), syms.clone());
    f.add_states(n - 1);
    for s in 0..n {
        f.set_final(s, true);
        for &l in &ls {
            if rng.gen_bool(0.7) {
                let o = if rng.gen_bool(0.15) { EPS } else { *ls.choose(rng).unwrap() };
                f.add_transition(s, l, o, rng.gen_range(0..n));
            }
        }
    }
    f
}

/// Random word-labeled machine with words of length up to 3 on each side.
pub fn random_word_fst<R: Rng>(rng: &mut R, syms: &SymbolTable, max_states: usize) -> WordFst {
    let ls = labels(syms);
    let n = rng.gen_range(1..=max_states);
    let word = |rng: &mut R| -> Vec<Label> {
        let len = rng.gen_range(0..=3);
        (0..len).map(|_| *ls.choose(rng).unwrap()).collect()
    };
    let arcs = (0..rng.gen_range(0..=2 * n + 1))
        .map(|_| {
            let src = rng.gen_range(0..n);
            let dst = rng.gen_range(0..n);
            WordArc::new(src, word(rng), word(rng), dst)
        })
        .collect();
    WordFst {
        num_states: n,
        start: 0,
        finals: (0..n).filter(|_| rng.gen_bool(0.5)).collect(),
        arcs,
        isyms: syms.clone(),
        osyms: syms.clone(),
    }
}

/// One attack drawn from the builders.
pub fn random_builder_attack<R: Rng>(rng: &mut R, syms: &SymbolTable) -> Fst {
    let ls = labels(syms);
    let sub = random_subset(rng, &ls);
    match rng.gen_range(0..5) {
        0 => projection_attack(syms, &sub).expect("labels from table"),
        1 => deletion_attack(syms, &sub).expect("labels from table"),
        2 => injection_attack(syms, &sub).expect("labels from table"),
        3 => injection_removal_attack(syms, &sub).expect("labels from table"),
        _ => {
            let mut overrides = Vec::new();
            for &l in &ls {
                if !rng.gen_bool(0.5) {
                    continue;
                }
                let mut img = random_subset(rng, &ls);
                if rng.gen_bool(0.3) {
                    img.push(EPS);
                }
                if img.is_empty() {
                    img.push(l);
                }
                overrides.push((l, img));
            }
            let rule = ReplacementRule::identity_with(syms, overrides).expect("valid rule");
            replacement_removal_attack(syms, &rule)
        }
    }
}

/// Plant, attacks and desired language satisfying both input-language
/// assumptions.
#[derive(Debug, Clone)]
pub struct SynthesisInstance {
    pub plant: Fst,
    pub sensor_attack: Fst,
    pub actuator_attack: Fst,
    pub desired: DesiredLanguage,
}

/// Draws instances until one satisfies the assumptions (at most `tries`).
pub fn random_synthesis_instance<R: Rng>(
    rng: &mut R,
    syms: &SymbolTable,
    max_plant_states: usize,
    max_desired_states: usize,
    tries: usize,
) -> Option<SynthesisInstance> {
    for _ in 0..tries {
        let plant = random_plant(rng, syms, max_plant_states);
        let sensor = restrict_sensor(&plant, &random_builder_attack(rng, syms)).ok()?;
        let actuator = restrict_actuator(&plant, &random_builder_attack(rng, syms)).ok()?;
        if check_sensor_assumption(&plant, &sensor).is_err()
            || check_actuator_assumption(&plant, &actuator).is_err()
        {
            continue;
        }
        let k = random_prefix_closed(rng, syms, max_desired_states);
        let k = intersect(&k, &project_input(&plant)).ok()?;
        let desired = DesiredLanguage::new(&k).ok()?;
        return Some(SynthesisInstance {
            plant,
            sensor_attack: sensor,
            actuator_attack: actuator,
            desired,
        });
    }
    None
}

/// Plant automaton, uncontrollable symbols and desired language for the
/// classical controllability reduction. The actuator attack is
/// `injection(I_uc) ∘ P`.
#[derive(Debug, Clone)]
pub struct ClassicalInstance {
    pub plant: Fst,
    pub uncontrollable: Vec<Label>,
    pub actuator_attack: Fst,
    pub desired: DesiredLanguage,
}

pub fn random_classical_instance<R: Rng>(
    rng: &mut R,
    syms: &SymbolTable,
    plant_states: usize,
    max_desired_states: usize,
) -> ClassicalInstance {
    let plant = prefix_closed_with_states(rng, syms, plant_states);
    let ls = labels(syms);
    let mut uc = random_subset(rng, &ls);
    if uc.is_empty() {
        uc.push(*ls.choose(rng).unwrap());
    }
    let inj = injection_attack(syms, &uc).expect("labels from table");
    let actuator_attack = compose(&inj, &plant).expect("shared alphabet");
    let k = random_prefix_closed(rng, syms, max_desired_states);
    let k = intersect(&k, &plant).expect("shared alphabet");
    ClassicalInstance {
        desired: DesiredLanguage::new(&k).expect("prefix-closed by construction"),
        plant,
        uncontrollable: uc,
        actuator_attack,
    }
}
