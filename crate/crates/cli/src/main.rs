//! `supfst`: command-line front end.
//!
//! Exit codes: 0 success or verdict true, 1 verdict false, 2 usage or input
//! error.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use supfst_core::attacks::{
    deletion_attack, frequency_constrain, injection_attack, injection_removal_attack,
    projection_attack, replacement_removal_attack, replay_attack, FrequencyCounter,
    ReplacementRule,
};
use supfst_core::automaton::{language_upto, project_input, project_output};
use supfst_core::casestudy::{bench_tsv, run_benchmark, scenario, synthesize, SchedulingInstance};
use supfst_core::nonblocking::{check_closed_loop_nonblocking, LoopMode, NonblockingReport};
use supfst_core::synthesis::{check_controllable_relaxed, closed_loop_language_upto};
use supfst_core::text::collect_symbols;
use supfst_core::{
    apply, compose, determinize, filter, invert, parallel, read_fst, synth_actuator, synth_both,
    synth_sensor, to_dot, trim, write_fst, DesiredLanguage, FilterMode, Fst, Label, SymbolTable,
    SynthesisOptions, SynthesisReport,
};

#[derive(Parser)]
#[command(name = "supfst", version, about = "Attack-resilient supervisor synthesis with finite state transducers")]
struct Cli {
    /// Symbol table (`name<TAB>id`) shared by every machine. Without it the
    /// table is inferred from the labels of all input files.
    #[arg(long, global = true)]
    symbols: Option<PathBuf>,

    /// Emit Graphviz dot instead of the text format for machine outputs.
    #[arg(long, global = true)]
    dot: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serial composition of two or more machines, left to right.
    Compose {
        #[arg(required = true, num_args = 2..)]
        machines: Vec<String>,
    },
    /// Swap input and output labels.
    Invert { machine: String },
    /// Union of the relations of two or more machines.
    Parallel {
        #[arg(required = true, num_args = 2..)]
        machines: Vec<String>,
    },
    /// Subset construction of an automaton.
    Determinize { machine: String },
    /// Remove states that are unreachable or cannot reach a final state.
    Trim { machine: String },
    /// Outputs of a machine for one input word.
    Run {
        machine: String,
        /// Space- or comma-separated symbol names; empty for the empty word.
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Input or output language as an automaton.
    Project {
        machine: String,
        #[arg(long, value_enum, default_value_t = ProjSide::Input)]
        side: ProjSide,
    },
    /// Longest-prefix filter of a desired language.
    Filter {
        #[arg(long)]
        desired: String,
        #[arg(long)]
        plant: String,
    },
    /// Build an attack machine.
    Attack(AttackArgs),
    /// Synthesize a supervisor.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[command(flatten)]
        setup: Setup,
        /// Drop the plant inverse (sound for one-state identity plants).
        #[arg(long)]
        drop_plant_inverse: bool,
        /// Use the longest-prefix filter instead of the identity on the
        /// desired language.
        #[arg(long)]
        pass_through: bool,
        /// Where the supervisor is written.
        #[arg(long, default_value = "supervisor.fst")]
        out: PathBuf,
    },
    /// Verdict-only checks.
    #[command(subcommand)]
    Check(Check),
    /// Words reaching the plant in closed loop, up to a length.
    Oracle {
        #[arg(long)]
        plant: String,
        #[arg(long)]
        supervisor: String,
        #[arg(long)]
        attack_s: Option<String>,
        #[arg(long)]
        attack_a: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Compare against this desired language instead of listing words.
        #[arg(long)]
        desired: Option<String>,
    },
    /// Scheduling case study for one instance.
    Casestudy {
        /// Players.
        #[arg(long)]
        n: usize,
        /// Tasks per player.
        #[arg(long)]
        m: usize,
        /// Write plant, desired language, attacks, supervisor and symbols here.
        #[arg(long)]
        emit_all: Option<PathBuf>,
    },
    /// Timing table for case-study rows.
    Bench {
        /// Rows as `m:n` (tasks per player, players), comma-separated.
        #[arg(long, default_value = "9:2,9:3")]
        rows: String,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        /// Rows whose desired language exceeds this many states are skipped.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjSide {
    Input,
    Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Sensor,
    Actuator,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sensor,
    Actuator,
    Both,
}

impl From<Mode> for LoopMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Sensor => LoopMode::Sensor,
            Mode::Actuator => LoopMode::Actuator,
            Mode::Both => LoopMode::Both,
        }
    }
}

#[derive(Args)]
struct Setup {
    #[arg(long)]
    plant: String,
    #[arg(long)]
    attack_s: Option<String>,
    #[arg(long)]
    attack_a: Option<String>,
    #[arg(long)]
    desired: String,
}

#[derive(Args)]
struct AttackArgs {
    /// Alphabet as comma-separated names, when `--symbols` is not given.
    #[arg(long, global = true)]
    alphabet: Option<String>,
    #[command(subcommand)]
    kind: AttackKind,
}

#[derive(Subcommand)]
enum AttackKind {
    /// Erase every symbol outside `keep`.
    Projection {
        #[arg(long, default_value = "")]
        keep: String,
    },
    /// Possibly erase any symbol outside `protected`.
    Deletion {
        #[arg(long, default_value = "")]
        protected: String,
    },
    /// Insert symbols of `inject` anywhere.
    Injection {
        #[arg(long)]
        inject: String,
    },
    /// Insert or erase symbols of `vulnerable`.
    InjectionRemoval {
        #[arg(long)]
        vulnerable: String,
    },
    /// Replace symbols: `--map i2=i1 --map i1=<eps>,i2`; unmapped symbols
    /// pass through.
    Replacement {
        #[arg(long = "map")]
        maps: Vec<String>,
    },
    /// Record up to `n` symbols and replay them cyclically.
    Replay {
        #[arg(long)]
        n: usize,
    },
    /// Enable an attack only where a D/E counter allows it.
    Freq {
        #[arg(long)]
        inner: String,
        /// Counter automaton over the symbols D and E.
        #[arg(long, conflicts_with = "pattern")]
        counter: Option<String>,
        /// Cyclic counter such as `DDE`.
        #[arg(long)]
        pattern: Option<String>,
    },
}

#[derive(Subcommand)]
enum Check {
    /// Controllability of the desired language under an actuator attack.
    Controllable {
        #[arg(long)]
        plant: String,
        #[arg(long)]
        attack_a: String,
        #[arg(long)]
        desired: String,
        /// Allow the attack to generate only part of the plant's input language.
        #[arg(long)]
        relaxed: bool,
    },
    /// Nonblocking of a machine for a relation contained in it.
    Nonblocking {
        #[arg(long)]
        fst: String,
        #[arg(long)]
        relation: String,
    },
    /// Nonblocking of the attacked plant for the relation induced by a supervisor.
    LoopNonblocking {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        plant: String,
        #[arg(long)]
        supervisor: String,
        #[arg(long)]
        attack_s: Option<String>,
        #[arg(long)]
        attack_a: Option<String>,
        /// Use this relation instead of the induced one.
        #[arg(long)]
        relation: Option<String>,
    },
}

/// Usage or input problem; always exit code 2.
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<supfst_core::Error> for Failure {
    fn from(e: supfst_core::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))
    }
}

/// Machines read with one shared symbol table.
struct Loaded {
    table: SymbolTable,
    machines: Vec<Fst>,
}

fn load(symbols: Option<&Path>, paths: &[&str]) -> Result<Loaded, Failure> {
    let texts = paths
        .iter()
        .map(|p| read_source(p))
        .collect::<Result<Vec<_>, _>>()?;
    let table = match symbols {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            SymbolTable::parse(&text).map_err(|e| Failure(format!("{}: {e}", p.display())))?
        }
        None => {
            // scan files one by one first so a format error names its file
            for (p, t) in paths.iter().zip(&texts) {
                collect_symbols([t.as_str()]).map_err(|e| Failure(format!("{p}: {e}")))?;
            }
            collect_symbols(texts.iter().map(String::as_str))?
        }
    };
    let machines = paths
        .iter()
        .zip(&texts)
        .map(|(p, t)| read_fst(t, Some(&table), Some(&table)).map_err(|e| Failure(format!("{p}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Loaded { table, machines })
}

fn load_optional(symbols: Option<&Path>, paths: &[Option<&str>]) -> Result<(SymbolTable, Vec<Option<Fst>>), Failure> {
    let present: Vec<&str> = paths.iter().flatten().copied().collect();
    let loaded = load(symbols, &present)?;
    let mut it = loaded.machines.into_iter();
    let out = paths.iter().map(|p| p.and_then(|_| it.next())).collect();
    Ok((loaded.table, out))
}

fn emit(fst: &Fst, dot: bool) -> Outcome {
    let text = if dot { to_dot(fst) } else { write_fst(fst) };
    io::stdout().write_all(text.as_bytes())?;
    Ok(true)
}

fn names(table: &SymbolTable, list: &str) -> Result<Vec<Label>, Failure> {
    Ok(table.parse_word(list)?)
}

fn print_report(r: &SynthesisReport) {
    if r.controllable {
        println!("controllable");
    } else {
        println!("not controllable");
        println!("weakly controllable: {}", r.weakly_controllable);
        if let Some(w) = r.witness_text() {
            println!("witness: {w}");
        }
    }
}

fn print_nonblocking(r: &NonblockingReport, machine: &Fst) {
    if r.nonblocking {
        println!("nonblocking");
        return;
    }
    println!("blocking");
    if let Some(v) = &r.violation {
        let (i, o) = v.witness();
        println!(
            "witness: {} / {}",
            machine.isyms().format_word(&i),
            machine.osyms().format_word(&o)
        );
        println!("{}", v.describe(machine.isyms(), machine.osyms()));
    }
}

fn attack(cli: &Cli, args: &AttackArgs) -> Outcome {
    let table = match (&cli.symbols, &args.alphabet) {
        (Some(p), _) => SymbolTable::parse(&fs::read_to_string(p)?)?,
        (None, Some(a)) => SymbolTable::from_names(a.split(',').map(str::trim).filter(|s| !s.is_empty())),
        (None, None) => {
            if let AttackKind::Freq { inner, .. } = &args.kind {
                collect_symbols([read_source(inner)?.as_str()])?
            } else {
                return Err(Failure("attack needs --alphabet or --symbols".into()));
            }
        }
    };
    let fst = match &args.kind {
        AttackKind::Projection { keep } => projection_attack(&table, &names(&table, keep)?)?,
        AttackKind::Deletion { protected } => deletion_attack(&table, &names(&table, protected)?)?,
        AttackKind::Injection { inject } => injection_attack(&table, &names(&table, inject)?)?,
        AttackKind::InjectionRemoval { vulnerable } => {
            injection_removal_attack(&table, &names(&table, vulnerable)?)?
        }
        AttackKind::Replacement { maps } => {
            let mut overrides = Vec::new();
            for m in maps {
                let (from, to) = m
                    .split_once('=')
                    .ok_or_else(|| Failure(format!("--map `{m}` is not of the form a=b,c")))?;
                let from = names(&table, from)?;
                let [from] = from[..] else {
                    return Err(Failure(format!("--map `{m}` must name exactly one symbol on the left")));
                };
                let mut image = Vec::new();
                for tok in to.split(',').map(str::trim) {
                    if tok == "<eps>" || tok.is_empty() {
                        image.push(supfst_core::EPS);
                    } else {
                        image.extend(names(&table, tok)?);
                    }
                }
                overrides.push((from, image));
            }
            let rule = ReplacementRule::identity_with(&table, overrides)?;
            replacement_removal_attack(&table, &rule)
        }
        AttackKind::Replay { n } => replay_attack(&table, *n)?,
        AttackKind::Freq { inner, counter, pattern } => {
            let text = read_source(inner)?;
            let inner_fst = read_fst(&text, Some(&table), Some(&table)).map_err(|e| Failure(format!("{inner}: {e}")))?;
            let counter = match (counter, pattern) {
                (Some(c), _) => {
                    let f = read_fst(&read_source(c)?, None, None).map_err(|e| Failure(format!("{c}: {e}")))?;
                    FrequencyCounter::new(f)?
                }
                (None, Some(p)) => FrequencyCounter::cycle(p)?,
                (None, None) => return Err(Failure("freq needs --counter or --pattern".into())),
            };
            frequency_constrain(&inner_fst, &counter)?
        }
    };
    emit(&fst, cli.dot)
}

fn synth(cli: &Cli, kind: SynthKind, setup: &Setup, opts: &SynthesisOptions, out: &Path) -> Outcome {
    let need = |o: &Option<String>, what: &str| {
        o.clone().ok_or_else(|| Failure(format!("this synthesis needs --{what}")))
    };
    let (attack_s, attack_a) = match kind {
        SynthKind::Sensor => (Some(need(&setup.attack_s, "attack-s")?), None),
        SynthKind::Actuator => (None, Some(need(&setup.attack_a, "attack-a")?)),
        SynthKind::Both => (
            Some(need(&setup.attack_s, "attack-s")?),
            Some(need(&setup.attack_a, "attack-a")?),
        ),
    };
    let (_, m) = load_optional(
        cli.symbols.as_deref(),
        &[Some(&setup.plant), Some(&setup.desired), attack_s.as_deref(), attack_a.as_deref()],
    )?;
    let [Some(plant), Some(k), s, a] = &m[..] else {
        unreachable!("plant and desired language are always loaded")
    };
    let k = DesiredLanguage::new(k)?;
    let r = match kind {
        SynthKind::Sensor => synth_sensor(plant, s.as_ref().unwrap(), &k, opts)?,
        SynthKind::Actuator => synth_actuator(plant, a.as_ref().unwrap(), &k, opts)?,
        SynthKind::Both => synth_both(plant, a.as_ref().unwrap(), s.as_ref().unwrap(), &k, opts)?,
    };
    let text = if cli.dot { to_dot(&r.supervisor) } else { write_fst(&r.supervisor) };
    fs::write(out, text).map_err(|e| Failure(format!("{}: {e}", out.display())))?;
    print_report(&r);
    println!("supervisor: {} ({} states)", out.display(), r.supervisor.num_states());
    Ok(r.controllable)
}

fn check(cli: &Cli, c: &Check) -> Outcome {
    let symbols = cli.symbols.as_deref();
    match c {
        Check::Controllable { plant, attack_a, desired, relaxed } => {
            let l = load(symbols, &[plant, attack_a, desired])?;
            let [p, a, k] = &l.machines[..] else { unreachable!() };
            let k = DesiredLanguage::new(k)?;
            if *relaxed {
                let v = check_controllable_relaxed(a, p, &k)?;
                println!("{}", if v.holds { "controllable" } else { "not controllable" });
                if let Some(w) = &v.witness {
                    println!("witness: {}", w.render(&l.table, &l.table));
                }
                Ok(v.holds)
            } else {
                let r = synth_actuator(p, a, &k, &SynthesisOptions::default())?;
                print_report(&r);
                Ok(r.controllable)
            }
        }
        Check::Nonblocking { fst, relation } => {
            let l = load(symbols, &[fst, relation])?;
            let r = supfst_core::check_nonblocking(&l.machines[0], &l.machines[1])?;
            print_nonblocking(&r, &l.machines[0]);
            Ok(r.nonblocking)
        }
        Check::LoopNonblocking { mode, plant, supervisor, attack_s, attack_a, relation } => {
            let (_, m) = load_optional(
                symbols,
                &[Some(plant), Some(supervisor), attack_s.as_deref(), attack_a.as_deref(), relation.as_deref()],
            )?;
            let plant = m[0].as_ref().unwrap();
            let sup = m[1].as_ref().unwrap();
            let r = check_closed_loop_nonblocking(
                plant,
                m[2].as_ref(),
                m[3].as_ref(),
                sup,
                (*mode).into(),
                m[4].as_ref(),
            )?;
            print_nonblocking(&r, plant);
            Ok(r.nonblocking)
        }
    }
}

fn oracle(
    cli: &Cli,
    plant: &str,
    supervisor: &str,
    attack_s: Option<&str>,
    attack_a: Option<&str>,
    max_len: usize,
    desired: Option<&str>,
) -> Outcome {
    let (table, m) = load_optional(
        cli.symbols.as_deref(),
        &[Some(plant), Some(supervisor), attack_s, attack_a, desired],
    )?;
    let words = closed_loop_language_upto(
        m[0].as_ref().unwrap(),
        m[2].as_ref(),
        m[1].as_ref().unwrap(),
        m[3].as_ref(),
        max_len,
    )?;
    let Some(k) = &m[4] else {
        for w in &words {
            println!("{}", table.format_word(w));
        }
        return Ok(true);
    };
    let expected = language_upto(k, max_len)?;
    if let Some(w) = words.symmetric_difference(&expected).next() {
        let side = if words.contains(w) { "closed loop only" } else { "desired only" };
        println!("differs up to length {max_len}");
        println!("witness: {} ({side})", table.format_word(w));
        Ok(false)
    } else {
        println!("matches up to length {max_len} ({} words)", words.len());
        Ok(true)
    }
}

fn casestudy(cli: &Cli, n: usize, m: usize, dir: Option<&Path>) -> Outcome {
    let inst = SchedulingInstance::new(n, m)?;
    let sc = scenario(&inst)?;
    let r = synthesize(&sc)?;
    println!("players {n}, tasks per player {m}, desired states {}", sc.desired.automaton().num_states());
    print_report(&r);
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        let render = |f: &Fst| if cli.dot { to_dot(f) } else { write_fst(f) };
        let files = [
            ("plant.fst", render(&sc.plant)),
            ("desired.fst", render(sc.desired.automaton())),
            ("sensor_attack.fst", render(&sc.sensor_attack)),
            ("actuator_attack.fst", render(&sc.actuator_attack)),
            ("supervisor.fst", render(&r.supervisor)),
            ("symbols.txt", inst.symbols().to_text()),
        ];
        for (name, text) in files {
            fs::write(dir.join(name), text)?;
        }
        println!("wrote {}", dir.display());
    }
    Ok(r.controllable)
}

fn bench(rows: &str, reps: usize, budget: usize, out: Option<&Path>) -> Outcome {
    let mut parsed = Vec::new();
    for row in rows.split(',').map(str::trim).filter(|r| !r.is_empty()) {
        let bad = || Failure(format!("row `{row}` is not of the form m:n"));
        let (m, n) = row.split_once(':').ok_or_else(bad)?;
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        parsed.push((n, m));
    }
    let records = run_benchmark(&parsed, reps, budget)?;
    let tsv = bench_tsv(&records);
    match out {
        Some(p) => fs::write(p, &tsv)?,
        None => print!("{tsv}"),
    }
    Ok(true)
}

fn run(cli: &Cli) -> Outcome {
    let symbols = cli.symbols.as_deref();
    match &cli.command {
        Command::Compose { machines } => {
            let paths: Vec<&str> = machines.iter().map(String::as_str).collect();
            let l = load(symbols, &paths)?;
            let mut acc = l.machines[0].clone();
            for m in &l.machines[1..] {
                acc = compose(&acc, m)?;
            }
            emit(&acc, cli.dot)
        }
        Command::Parallel { machines } => {
            let paths: Vec<&str> = machines.iter().map(String::as_str).collect();
            let l = load(symbols, &paths)?;
            let mut acc = l.machines[0].clone();
            for m in &l.machines[1..] {
                acc = parallel(&acc, m)?;
            }
            emit(&acc, cli.dot)
        }
        Command::Invert { machine } => emit(&invert(&load(symbols, &[machine])?.machines[0]), cli.dot),
        Command::Determinize { machine } => emit(&determinize(&load(symbols, &[machine])?.machines[0])?, cli.dot),
        Command::Trim { machine } => emit(&trim(&load(symbols, &[machine])?.machines[0]), cli.dot),
        Command::Project { machine, side } => {
            let f = &load(symbols, &[machine])?.machines[0];
            let p = match side {
                ProjSide::Input => project_input(f),
                ProjSide::Output => project_output(f),
            };
            emit(&p, cli.dot)
        }
        Command::Run { machine, input, max_len } => {
            let l = load(symbols, &[machine])?;
            let word = l.table.parse_word(input)?;
            let r = apply(&l.machines[0], &word, *max_len);
            for o in &r.outputs {
                println!("{}", l.table.format_word(o));
            }
            if r.truncated {
                eprintln!("note: longer outputs exist beyond length {max_len}");
            }
            Ok(true)
        }
        Command::Filter { desired, plant } => {
            let l = load(symbols, &[desired, plant])?;
            let k = DesiredLanguage::new(&l.machines[0])?;
            emit(&filter(&k, &project_input(&l.machines[1]))?, cli.dot)
        }
        Command::Attack(args) => attack(cli, args),
        Command::Synth { kind, setup, drop_plant_inverse, pass_through, out } => {
            let opts = SynthesisOptions {
                drop_plant_inverse: *drop_plant_inverse,
                filter_mode: if *pass_through { FilterMode::PassThrough } else { FilterMode::Restrict },
            };
            synth(cli, *kind, setup, &opts, out)
        }
        Command::Check(c) => check(cli, c),
        Command::Oracle { plant, supervisor, attack_s, attack_a, max_len, desired } => oracle(
            cli,
            plant,
            supervisor,
            attack_s.as_deref(),
            attack_a.as_deref(),
            *max_len,
            desired.as_deref(),
        ),
        Command::Casestudy { n, m, emit_all } => casestudy(cli, *n, *m, emit_all.as_deref()),
        Command::Bench { rows, reps, budget, out } => bench(rows, *reps, *budget, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
