use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use supfst_core::apply::relation_equal_upto;
use supfst_core::text::collect_symbols;
use supfst_core::{read_fst, write_fst, Fst, SymbolTable};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn supfst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supfst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn supfst_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_supfst"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("supfst-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn parse_all(texts: &[&str]) -> (SymbolTable, Vec<Fst>) {
    let t = collect_symbols(texts.iter().copied()).unwrap();
    let fs = texts
        .iter()
        .map(|x| read_fst(x, Some(&t), Some(&t)).unwrap())
        .collect();
    (t, fs)
}

#[test]
fn double_inversion_is_canonical_identity() {
    let path = data("trans_1.fst");
    let once = supfst(&["invert", &path]);
    assert_eq!(once.status.code(), Some(0));
    let twice = supfst_stdin(&["invert", "-"], &stdout(&once));
    assert_eq!(twice.status.code(), Some(0));
    let original = std::fs::read_to_string(&path).unwrap();
    let (_, f) = parse_all(&[&original]);
    assert_eq!(stdout(&twice), write_fst(&f[0]));
}

#[test]
fn combined_synthesis_case_one_is_controllable() {
    let out = tmp("sup_both.fst");
    let o = supfst(&[
        "synth",
        "both",
        "--plant",
        &data("input_plant.fst"),
        "--attack-a",
        &data("input_attack_1.fst"),
        "--attack-s",
        &data("both_attack_1.fst"),
        "--desired",
        &data("input_desired.fst"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("controllable"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn actuator_case_two_reports_witness() {
    let out = tmp("sup_act2.fst");
    let o = supfst(&[
        "synth",
        "actuator",
        "--plant",
        &data("input_plant.fst"),
        "--attack-a",
        &data("input_attack_2.fst"),
        "--desired",
        &data("input_desired.fst"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("not controllable"));
    assert!(s.contains("witness: i1 i1"));
}

#[test]
fn non_imp_is_blocking() {
    let o = supfst(&[
        "check",
        "nonblocking",
        "--fst",
        &data("non_imp.fst"),
        "--relation",
        &data("non_imp_relation.fst"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.starts_with("blocking"));
    assert!(s.contains("witness: i1 i2 / i3 i3"));
    assert!(s.contains("[1, 2]"));
}

#[test]
fn piped_composition_matches_one_shot() {
    let (a, b, c) = (data("trans_1.fst"), data("trans_2.fst"), data("output_attack_1.fst"));
    let first = supfst(&["compose", &a, &b]);
    assert_eq!(first.status.code(), Some(0));
    let piped = supfst_stdin(&["compose", "-", &c], &stdout(&first));
    let direct = supfst(&["compose", &a, &b, &c]);
    assert_eq!(piped.status.code(), Some(0));
    assert_eq!(direct.status.code(), Some(0));
    let (_, fs) = parse_all(&[&stdout(&piped), &stdout(&direct)]);
    assert!(relation_equal_upto(&fs[0], &fs[1], 4).unwrap().holds);
}

#[test]
fn emitted_machines_reparse_identically() {
    let o = supfst(&["compose", &data("trans_1.fst"), &data("trans_2.fst")]);
    let text = stdout(&o);
    let (_, fs) = parse_all(&[&text]);
    assert_eq!(write_fst(&fs[0]), text);
}

#[test]
fn oracle_matches_desired_language() {
    let sup = tmp("sup_oracle.fst");
    let s = supfst(&[
        "synth",
        "actuator",
        "--plant",
        &data("input_plant.fst"),
        "--attack-a",
        &data("input_attack_1.fst"),
        "--desired",
        &data("input_desired.fst"),
        "--out",
        sup.to_str().unwrap(),
    ]);
    assert_eq!(s.status.code(), Some(0));
    let o = supfst(&[
        "oracle",
        "--plant",
        &data("input_plant.fst"),
        "--attack-a",
        &data("input_attack_1.fst"),
        "--supervisor",
        sup.to_str().unwrap(),
        "--desired",
        &data("input_desired.fst"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("matches up to length 6"));
}

#[test]
fn format_errors_exit_two_with_line() {
    let bad = tmp("bad.fst");
    std::fs::write(&bad, "0 1 i1 i2\n1 1\n").unwrap();
    let o = supfst(&["invert", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");

    let o = supfst(&["invert", "/nonexistent/x.fst"]);
    assert_eq!(o.status.code(), Some(2));
    let o = supfst(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn attack_builders_from_the_command_line() {
    let o = supfst(&["attack", "--alphabet", "i1,i2", "deletion"]);
    assert_eq!(o.status.code(), Some(0));
    let freq = supfst_stdin(
        &["attack", "--alphabet", "i1,i2", "freq", "--inner", "-", "--pattern", "DDE"],
        &stdout(&o),
    );
    assert_eq!(freq.status.code(), Some(0));
    let run = supfst_stdin(&["run", "-", "--input", "i1 i1 i1"], &stdout(&freq));
    assert_eq!(stdout(&run), "i1 i1\ni1 i1 i1\n");

    let r = supfst(&["attack", "--alphabet", "i1,i2", "replacement", "--map", "i2=i1"]);
    let run = supfst_stdin(&["run", "-", "--input", "i2 i2"], &stdout(&r));
    assert_eq!(stdout(&run), "i1 i1\n");

    let o = supfst(&["attack", "--alphabet", "i1,i2", "replay", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn casestudy_emits_all_machines() {
    let dir = tmp("cs");
    let o = supfst(&["casestudy", "--n", "2", "--m", "2", "--emit-all", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("desired states 9"));
    for f in ["plant.fst", "desired.fst", "sensor_attack.fst", "actuator_attack.fst", "supervisor.fst", "symbols.txt"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
    let syms = tmp("cs/symbols.txt");
    let o = supfst(&[
        "--symbols",
        syms.to_str().unwrap(),
        "trim",
        dir.join("supervisor.fst").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bench_writes_tsv() {
    let out = tmp("bench.tsv");
    let o = supfst(&["bench", "--rows", "2:2,9:3", "--reps", "1", "--budget", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let tsv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "n\tm\tstates\ttime_ms_mean\tpeak_transitions\tcontrollable");
    assert!(lines[1].starts_with("2\t2\t9\t"));
    assert!(lines[2].contains("skipped"));
}

#[test]
fn dot_export() {
    let o = supfst(&["--dot", "trim", &data("trans_1.fst")]);
    let s = stdout(&o);
    assert!(s.starts_with("digraph fst {"));
    assert!(s.contains("__start -> 0;"));
}
