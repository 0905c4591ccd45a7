//! Small hand-built machines: the worked examples used by tests, the
//! acceptance suite and the CLI demos.

use crate::fst::{Fst, StateId};
use crate::symbol::SymbolTable;

type Arc<'a> = (StateId, &'a str, &'a str, StateId);

/// Builds a machine over `syms` from named arcs. `finals = None` makes every
/// state final.
pub fn build(syms: &SymbolTable, states: usize, finals: Option<&[StateId]>, arcs: &[Arc]) -> Fst {
    let mut f = Fst::new(syms.clone(), syms.clone());
    f.add_states(states - 1);
    for s in 0..states {
        f.set_final(s, finals.is_none_or(|fs| fs.contains(&s)));
    }
    for &(src, i, o, dst) in arcs {
        let il = syms.find(i).unwrap_or_else(|| panic!("unknown symbol {i}"));
        let ol = syms.find(o).unwrap_or_else(|| panic!("unknown symbol {o}"));
        f.add_transition(src, il, ol, dst);
    }
    f
}

const E: &str = "<eps>";

pub fn i12() -> SymbolTable {
    SymbolTable::from_names(["i1", "i2"])
}

pub fn i123() -> SymbolTable {
    SymbolTable::from_names(["i1", "i2", "i3"])
}

/// Composition example, left operand.
pub fn trans_1() -> Fst {
    build(&i123(), 2, None, &[(0, "i1", "i2", 1), (1, "i1", E, 1)])
}

/// Composition example, right operand.
pub fn trans_2() -> Fst {
    build(&i123(), 2, None, &[(0, E, "i3", 1), (0, "i2", "i1", 1)])
}

/// Full product of [`trans_1`] and [`trans_2`]; state 3 (pair `10`) is
/// unreachable. States: 0 = `00`, 1 = `11`, 2 = `01`, 3 = `10`.
pub fn comp() -> Fst {
    build(
        &i123(),
        4,
        None,
        &[
            (0, "i1", "i1", 1),
            (1, "i1", E, 1),
            (0, E, "i3", 2),
            (3, E, "i3", 1),
        ],
    )
}

/// Plant reporting `i2` whatever it executes.
pub fn output_plant() -> Fst {
    build(&i12(), 1, None, &[(0, "i1", "i2", 0), (0, "i2", "i2", 0)])
}

/// Sensor attack rewriting `i2` into `i1`.
pub fn output_attack_1() -> Fst {
    build(&i12(), 1, None, &[(0, "i2", "i1", 0)])
}

/// `closure((i1 i2)*)`.
pub fn output_desired() -> Fst {
    build(&i12(), 2, None, &[(0, "i1", "i1", 1), (1, "i2", "i2", 0)])
}

pub fn output_supervisor_1() -> Fst {
    build(&i12(), 2, None, &[(0, "i1", "i1", 1), (1, "i1", "i2", 0)])
}

/// Plant executing any command and reporting it unchanged.
pub fn input_plant() -> Fst {
    Fst::identity(&i12())
}

/// `closure((i1 + i2) i2)`.
pub fn input_desired_language() -> Fst {
    build(
        &i12(),
        3,
        None,
        &[(0, "i1", "i1", 1), (0, "i2", "i2", 1), (1, "i2", "i2", 2)],
    )
}

/// Longest-prefix filter of [`input_desired_language`].
pub fn input_desired() -> Fst {
    build(
        &i12(),
        3,
        None,
        &[
            (0, "i1", "i1", 1),
            (0, "i2", "i2", 1),
            (1, "i2", "i2", 2),
            (1, "i1", E, 2),
            (2, "i1", E, 2),
            (2, "i2", E, 2),
        ],
    )
}

/// Actuator attacker I: may turn the first command `i1` into `i2`.
pub fn input_attack_1() -> Fst {
    build(
        &i12(),
        2,
        None,
        &[
            (0, "i1", "i1", 1),
            (0, "i1", "i2", 1),
            (1, "i1", "i1", 1),
            (1, "i2", "i2", 1),
        ],
    )
}

/// Actuator attacker II: may replace any command by any other.
pub fn input_attack_2() -> Fst {
    build(
        &i12(),
        1,
        None,
        &[
            (0, "i1", "i1", 0),
            (0, "i1", "i2", 0),
            (0, "i2", "i1", 0),
            (0, "i2", "i2", 0),
        ],
    )
}

/// `closure((i1 + i2)(i1 + i2))`.
pub fn input_superset_2() -> Fst {
    build(
        &i12(),
        3,
        None,
        &[
            (0, "i1", "i1", 1),
            (0, "i2", "i2", 1),
            (1, "i1", "i1", 2),
            (1, "i2", "i2", 2),
        ],
    )
}

pub fn input_supervisor_1() -> Fst {
    build(
        &i12(),
        3,
        None,
        &[(0, "i1", "i1", 1), (0, "i2", "i1", 1), (1, "i2", "i2", 2)],
    )
}

/// Sensor attacker I of the combined example.
pub fn both_attack_1() -> Fst {
    build(&i12(), 1, None, &[(0, "i1", "i2", 0), (0, "i2", E, 0)])
}

/// Sensor attacker II of the combined example.
pub fn both_attack_2() -> Fst {
    build(&i12(), 1, None, &[(0, "i1", "i2", 0), (0, "i2", "i2", 0)])
}

pub fn both_supervisor_1() -> Fst {
    build(
        &i12(),
        3,
        None,
        &[(0, "i2", "i1", 1), (0, E, "i1", 1), (1, E, "i2", 2)],
    )
}

/// Nondeterministic plant whose second command may be blocked.
pub fn non_imp() -> Fst {
    build(
        &i123(),
        4,
        None,
        &[
            (0, "i1", "i3", 1),
            (0, "i1", "i3", 2),
            (1, "i2", "i3", 3),
            (2, "i3", "i3", 3),
        ],
    )
}

/// Hand-built replay attack with memory 2 over `{i1, i2}`.
///
/// States: 0 = s, 1 = s1, 2 = s2, 3 = s01, 4 = s02, 5 = s3, 6 = s4,
/// 7 = s11, 8 = s22.
pub fn replay_2() -> Fst {
    build(
        &i12(),
        9,
        None,
        &[
            (0, "i1", "i1", 1),
            (0, "i1", "i1", 3),
            (0, "i2", "i2", 2),
            (0, "i2", "i2", 4),
            (3, "i1", "i1", 3),
            (3, "i2", "i1", 3),
            (4, "i1", "i2", 4),
            (4, "i2", "i2", 4),
            (1, "i1", "i1", 5),
            (5, "i1", "i1", 5),
            (5, "i2", "i1", 5),
            (1, "i2", "i2", 7),
            (2, "i2", "i2", 6),
            (6, "i1", "i2", 6),
            (6, "i2", "i2", 6),
            (2, "i1", "i1", 8),
            (7, "i1", "i1", 8),
            (7, "i2", "i1", 8),
            (8, "i1", "i2", 7),
            (8, "i2", "i2", 7),
        ],
    )
}

/// Symbols `t1_1, t1_2, t2_1, t2_2` of the two-player, two-task schedule.
pub fn sched_2x2() -> SymbolTable {
    SymbolTable::from_names(["t1_1", "t1_2", "t2_1", "t2_2"])
}

/// Supervisor of the two-player, two-task schedule.
pub fn sim_supervisor() -> Fst {
    build(
        &sched_2x2(),
        11,
        Some(&[0, 2, 3, 4, 5, 6, 8, 9, 10]),
        &[
            (0, "t2_1", "t2_1", 3),
            (0, E, "t1_1", 2),
            (0, "t2_1", "t1_1", 1),
            (3, "t2_2", "t2_2", 6),
            (3, E, "t1_1", 4),
            (5, "t2_1", "t2_1", 8),
            (4, E, "t1_2", 8),
            (4, "t2_2", "t1_2", 7),
            (4, "t2_2", "t2_2", 9),
            (6, E, "t1_1", 9),
            (7, E, "t2_2", 10),
            (1, E, "t2_1", 4),
            (8, "t2_2", "t2_2", 10),
            (9, E, "t1_2", 10),
            (2, E, "t1_2", 5),
            (2, "t2_1", "t2_1", 4),
        ],
    )
}

/// Actuator attack of the two-player, two-task schedule.
pub fn sim_ai() -> Fst {
    build(
        &sched_2x2(),
        3,
        Some(&[0]),
        &[
            (0, "t1_1", "t1_1", 0),
            (0, "t1_2", "t1_2", 0),
            (0, "t2_1", "t2_1", 0),
            (0, "t2_2", "t2_2", 0),
            (0, "t1_1", "t2_1", 1),
            (1, "t2_1", "t1_1", 0),
            (0, "t1_2", "t2_2", 2),
            (2, "t2_2", "t1_2", 0),
        ],
    )
}

/// Sensor attack of the two-player, two-task schedule.
pub fn sim_ao() -> Fst {
    build(
        &sched_2x2(),
        1,
        None,
        &[
            (0, "t1_1", E, 0),
            (0, "t1_2", E, 0),
            (0, "t2_1", "t2_1", 0),
            (0, "t2_2", "t2_2", 0),
        ],
    )
}

/// Desired schedule language: both players' tasks in index order.
/// State `3 * a + b` means player 1 finished `a` tasks and player 2 `b`.
pub fn sim_desired() -> Fst {
    let mut arcs = Vec::new();
    let names = [["t1_1", "t1_2"], ["t2_1", "t2_2"]];
    for a in 0..3 {
        for b in 0..3 {
            let s = 3 * a + b;
            if a < 2 {
                arcs.push((s, names[0][a], names[0][a], s + 3));
            }
            if b < 2 {
                arcs.push((s, names[1][b], names[1][b], s + 1));
            }
        }
    }
    build(&sched_2x2(), 9, None, &arcs)
}
