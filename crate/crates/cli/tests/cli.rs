// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use speedup_cli::trace::TraceDocument;

fn speedup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speedup")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn trace(args: &[&str]) -> TraceDocument {
    let out = speedup(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn grover_relativized_run() {
    let doc = trace(&["run", "--algo", "grover", "--n", "2", "--b", "00"]);
    let fin = doc.stages.iter().find(|s| s.stage == "U_A#1").unwrap();
    // One surviving term per tag: |b⟩|b⟩(|0⟩ − |1⟩)/(2√2).
    let x = 1.0 / (2.0 * 2f64.sqrt());
    assert_eq!(fin.state.components.len(), 4);
    for (tag, entries) in &fin.state.components {
        let b = format!("{:02b}", tag.to_string().trim_start_matches("phi").parse::<u64>().unwrap());
        assert_eq!(entries.len(), 2);
        let plus = entries[&format!("{b}|{b}|0")];
        let minus = entries[&format!("{b}|{b}|1")];
        assert!((plus.0 - x).abs() < 1e-12 && (minus.0 + x).abs() < 1e-12);
    }
    assert!((fin.entropy_b - 2.0).abs() < 1e-9);
    let last = doc.measurements.last().unwrap();
    assert_eq!(last.selected.to_string(), "00");
    assert_eq!(doc.solution, "a=00");
    assert!(doc.stages.last().unwrap().entropy_b.abs() < 1e-9);
}

#[test]
fn dj_constant_reads_all_zeros() {
    let doc = trace(&["run", "--algo", "dj", "--n", "2", "--b", "0000"]);
    assert_eq!(doc.measurements.last().unwrap().selected.to_string(), "00");
    assert_eq!(doc.solution, "constant");
    let doc = trace(&["run", "--algo", "dj", "--b", "0110", "--mode", "bob", "--seed", "9"]);
    assert_eq!(doc.solution, "balanced");
}

#[test]
fn simon_discards_zero_and_recovers_period() {
    let doc = trace(&["run", "--algo", "simon", "--n", "2", "--b", "0011", "--seed", "4"]);
    let dist: Vec<String> = doc.measurements.last().unwrap().distribution.keys().map(|k| k.to_string()).collect();
    assert_eq!(dist, ["00", "10"]);
    let simon = doc.simon.unwrap();
    assert_eq!(simon.strings.iter().map(|s| s.to_string()).collect::<Vec<_>>(), ["10"]);
    assert_eq!(simon.period.to_string(), "01");
    assert_eq!(doc.solution, "h=01");
}

#[test]
fn runs_are_deterministic_and_record_the_seed() {
    let args = ["run", "--algo", "grover", "--n", "3", "--b", "random", "--mode", "bob", "--seed", "42"];
    let (a, b) = (speedup(&args), speedup(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["config"]["requested"], "random");
}

#[test]
fn trace_states_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let out = speedup(&["run", "--algo", "simon", "--b", "0110", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: TraceDocument = serde_json::from_str(&text).unwrap();
    for stage in &doc.stages {
        let state = stage.state.to_state().unwrap();
        for (tag, entries) in &stage.state.components {
            for (label, &(re, im)) in entries {
                let c = state.amplitude(*tag, state.layout().parse_label(label).unwrap());
                let scale = re.abs().max(im.abs());
                assert!((c.re - re).abs() <= 1e-15 * scale && (c.im - im).abs() <= 1e-15 * scale);
            }
        }
        assert_eq!(speedup_cli::trace::StateRecord::from_state(&state), stage.state);
    }
    assert_eq!(serde_json::to_string_pretty(&doc).unwrap() + "\n", text);
}

#[test]
fn exit_codes() {
    assert_eq!(speedup(&["run", "--algo", "grover", "--b", "111"]).status.code(), Some(2));
    assert_eq!(speedup(&["run", "--algo", "dj", "--b", "0001"]).status.code(), Some(2));
    assert_eq!(speedup(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(speedup(&["run", "--algo", "grover", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(speedup(&["run", "--n", "2"]).status.code(), Some(2));
    assert_eq!(speedup(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(speedup(&["verify", "sharing"]).status.code(), Some(0));
}

#[test]
fn corrupted_family_fails_verification_by_name() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"kind": "dj", "n": 2, "members": ["0000", "0011", "0111"]}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let out = speedup(&["verify", "all", "--family", path]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["passed"], false);
    assert_eq!(report["checks"][0]["name"], "oracle.dj.invariants");
    assert_eq!(report["checks"][0]["passed"], false);
    // The same file is refused outright by commands that need a valid family.
    assert_eq!(speedup(&["share", "--family", path, "--b", "0011"]).status.code(), Some(2));

    let mut good = tempfile::NamedTempFile::new().unwrap();
    write!(good, r#"{{"kind": "dj", "n": 2, "members": ["0000", "0011", "1100"]}}"#).unwrap();
    assert_eq!(speedup(&["verify", "all", "--family", good.path().to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn report_tables() {
    let out = speedup(&["report", "speedup", "--n", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!((&row[2], &row[3], &row[5]), ("3", "1", "1"), "{row:?}");
    }
    let v = json(&speedup(&["report", "--algo", "dj", "--n", "2"]));
    assert_eq!(v[0]["classical_no_knowledge"], 3);
    assert_eq!(v[0]["matches"], true);
}

#[test]
fn share_and_history_documents() {
    let v = json(&speedup(&["share", "--algo", "dj", "--n", "2", "--b", "0011"]));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 1);
    assert_eq!(v["pairs"][0]["alice"], "{00:0,01:0}");
    let v = json(&speedup(&["histories", "--algo", "grover", "--n", "2", "--b", "00"]));
    assert_eq!(v["histories"].as_array().unwrap().len(), 8);
    assert_eq!(v["reconstruction"]["exact"], true);
    assert_eq!(v["histories"][0]["history"], "+phi0 |00|00|0⟩ → |00|00|1⟩");
}
