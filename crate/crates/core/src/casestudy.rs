//! Scheduling case study: `n` players each need `m` tasks served in index
//! order, under a sensor attack hiding player 1 and an actuator attack
//! rotating the players' commands within a round.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::fst::Fst;
use crate::symbol::{Label, SymbolTable, EPS};
use crate::synthesis::{synth_both, DesiredLanguage, SynthesisOptions, SynthesisReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchedulingInstance {
    pub players: usize,
    pub tasks_per_player: usize,
}

impl SchedulingInstance {
    pub fn new(players: usize, tasks_per_player: usize) -> Result<Self> {
        if players == 0 || tasks_per_player == 0 {
            return Err(Error::InvalidArgument(
                "players and tasks per player must be positive".into(),
            ));
        }
        Ok(Self {
            players,
            tasks_per_player,
        })
    }

    /// `t{i}_{j}` for player `i` and task `j`, player-major.
    pub fn symbols(&self) -> SymbolTable {
        let mut t = SymbolTable::new();
        for i in 1..=self.players {
            for j in 1..=self.tasks_per_player {
                t.add_symbol(&format!("t{i}_{j}"));
            }
        }
        t
    }

    /// Label of task `j` of player `i`, both 1-based.
    pub fn task(&self, i: usize, j: usize) -> Label {
        ((i - 1) * self.tasks_per_player + j) as Label
    }

    /// `(m + 1)^n`, or `None` on overflow.
    pub fn desired_state_count(&self) -> Option<usize> {
        (self.tasks_per_player + 1).checked_pow(self.players as u32)
    }
}

/// One state executing and reporting every task.
pub fn gen_plant(inst: &SchedulingInstance) -> Fst {
    Fst::identity(&inst.symbols())
}

/// Interleavings of the players' task sequences, each in index order.
/// State ids encode the per-player progress in base `m + 1`.
pub fn gen_desired(inst: &SchedulingInstance) -> Result<DesiredLanguage> {
    let states = inst
        .desired_state_count()
        .ok_or_else(|| Error::InvalidArgument("instance too large".into()))?;
    let syms = inst.symbols();
    let base = inst.tasks_per_player + 1;
    let mut f = Fst::new(syms.clone(), syms);
    f.add_states(states - 1);
    for s in 0..states {
        f.set_final(s, true);
        let mut rest = s;
        let mut weight = 1;
        for i in 1..=inst.players {
            let done = rest % base;
            rest /= base;
            if done < inst.tasks_per_player {
                let l = inst.task(i, done + 1);
                f.add_transition(s, l, l, s + weight);
            }
            weight *= base;
        }
    }
    DesiredLanguage::new(&f)
}

/// Erases the tasks of player 1.
pub fn gen_sensor_attack(inst: &SchedulingInstance) -> Fst {
    let syms = inst.symbols();
    let mut f = Fst::new(syms.clone(), syms);
    f.set_final(0, true);
    for i in 1..=inst.players {
        for j in 1..=inst.tasks_per_player {
            let l = inst.task(i, j);
            f.add_transition(0, l, if i == 1 { EPS } else { l }, 0);
        }
    }
    f
}

/// Identity on a hub state plus, for each task index `j`, a cycle that
/// reads `t1_j t2_j … tn_j` and emits `t2_j … tn_j t1_j`.
pub fn gen_actuator_attack(inst: &SchedulingInstance) -> Fst {
    let syms = inst.symbols();
    let mut f = Fst::identity(&syms);
    let n = inst.players;
    if n < 2 {
        return f;
    }
    for j in 1..=inst.tasks_per_player {
        let mut cur = 0;
        for i in 1..=n {
            let next = if i == n { 0 } else { f.add_state() };
            let emitted = if i == n { 1 } else { i + 1 };
            f.add_transition(cur, inst.task(i, j), inst.task(emitted, j), next);
            cur = next;
        }
    }
    f
}

/// The full scenario of one instance.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub plant: Fst,
    pub desired: DesiredLanguage,
    pub sensor_attack: Fst,
    pub actuator_attack: Fst,
}

pub fn scenario(inst: &SchedulingInstance) -> Result<Scenario> {
    Ok(Scenario {
        plant: gen_plant(inst),
        desired: gen_desired(inst)?,
        sensor_attack: gen_sensor_attack(inst),
        actuator_attack: gen_actuator_attack(inst),
    })
}

/// Synthesis as run by the benchmark: both attacks, inverse plant dropped.
pub fn synthesize(sc: &Scenario) -> Result<SynthesisReport> {
    let opts = SynthesisOptions {
        drop_plant_inverse: true,
        ..Default::default()
    };
    synth_both(
        &sc.plant,
        &sc.actuator_attack,
        &sc.sensor_attack,
        &sc.desired,
        &opts,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub players: usize,
    pub tasks_per_player: usize,
    pub desired_state_count: usize,
    /// Mean over the repetitions; `None` when the row was skipped.
    pub synth_time: Option<Duration>,
    pub peak_transition_count: usize,
    pub controllable: bool,
}

impl BenchRecord {
    pub fn skipped(&self) -> bool {
        self.synth_time.is_none()
    }
}

/// Runs each `(n, m)` row `repetitions` times. Rows whose desired language
/// exceeds `state_budget` states are reported as skipped.
pub fn run_benchmark(
    rows: &[(usize, usize)],
    repetitions: usize,
    state_budget: usize,
) -> Result<Vec<BenchRecord>> {
    let reps = repetitions.max(1);
    let mut out = Vec::new();
    for &(n, m) in rows {
        let inst = SchedulingInstance::new(n, m)?;
        let count = inst.desired_state_count().unwrap_or(usize::MAX);
        if count > state_budget {
            out.push(BenchRecord {
                players: n,
                tasks_per_player: m,
                desired_state_count: count,
                synth_time: None,
                peak_transition_count: 0,
                controllable: false,
            });
            continue;
        }
        let sc = scenario(&inst)?;
        let mut total = Duration::ZERO;
        let mut last = None;
        for _ in 0..reps {
            let t0 = Instant::now();
            let r = synthesize(&sc)?;
            total += t0.elapsed();
            last = Some(r);
        }
        let r = last.expect("at least one repetition");
        out.push(BenchRecord {
            players: n,
            tasks_per_player: m,
            desired_state_count: sc.desired.automaton().num_states(),
            synth_time: Some(total / reps as u32),
            peak_transition_count: r.peak_transitions,
            controllable: r.controllable,
        });
    }
    Ok(out)
}

/// Tab-separated table: `n m states time_ms_mean peak_transitions controllable`.
pub fn bench_tsv(records: &[BenchRecord]) -> String {
    let mut out = String::from("n\tm\tstates\ttime_ms_mean\tpeak_transitions\tcontrollable\n");
    for r in records {
        let time = r
            .synth_time
            .map(|d| format!("{:.3}", d.as_secs_f64() * 1e3))
            .unwrap_or_else(|| "skipped".into());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.players,
            r.tasks_per_player,
            r.desired_state_count,
            time,
            r.peak_transition_count,
            if r.skipped() { "-".into() } else { r.controllable.to_string() }
        );
    }
    out
}
