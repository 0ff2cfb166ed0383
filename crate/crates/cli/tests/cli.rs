use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mcnn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcnn")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mcnn(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// Re-runs a command from the flags recorded in its sidecar.
fn rerun_from_sidecar(dir: &Path, sidecar: &str) {
    let meta: Value = serde_json::from_str(&read(dir, sidecar)).unwrap();
    let mut args: Vec<String> = meta["command"].as_str().unwrap().split(' ').map(String::from).collect();
    for (k, v) in meta["flags"].as_object().unwrap() {
        let v = match v {
            Value::Null => continue,
            Value::String(s) => s.clone(),
            Value::Array(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            other => other.to_string(),
        };
        args.push(format!("--{}", k.replace('_', "-")));
        args.push(v);
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    ok(dir, &args);
}

#[test]
fn walker_train_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["walker", "train", "--dim", "2", "--out", "w.json", "--seed", "1"]);
    assert!(d.join("w.json.meta.json").exists());

    ok(d, &["walker", "run", "--model", "w.json", "--steps", "0", "--seed", "1", "--traj", "origin.csv"]);
    assert_eq!(read(d, "origin.csv"), "step,x,y\n0,0,0\n");

    ok(d, &["walker", "run", "--model", "w.json", "--steps", "20000", "--seed", "7", "--traj", "t.csv", "--stats", "s.csv"]);
    let stats = read(d, "s.csv");
    let mut lines = stats.lines();
    assert_eq!(lines.next(), Some("state,label,visits,frequency"));
    for line in lines {
        let f: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.22..=0.28).contains(&f), "{line}");
    }
    assert_eq!(read(d, "t.csv").lines().count(), 20_002);

    let (traj, stats) = (read(d, "t.csv"), read(d, "s.csv"));
    std::fs::remove_file(d.join("t.csv")).unwrap();
    std::fs::remove_file(d.join("s.csv")).unwrap();
    rerun_from_sidecar(d, "t.csv.meta.json");
    assert_eq!(read(d, "t.csv"), traj);
    assert_eq!(read(d, "s.csv"), stats);
}

#[test]
fn sidecar_records_flags_seeds_and_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["ttt", "simulate", "--games", "50", "--out", "d.bin"]);
    let meta: Value = serde_json::from_str(&read(d, "d.bin.meta.json")).unwrap();
    assert_eq!(meta["command"], "ttt simulate");
    let seed = meta["seeds"]["seed"].as_u64().unwrap();
    assert_eq!(meta["flags"]["seed"].as_u64(), Some(seed));
    assert_eq!(meta["artifact_hashes"]["d.bin"].as_str().unwrap().len(), 64);
    assert!(meta["timestamp"].as_str().unwrap().contains('T'));

    let bytes = std::fs::read(d.join("d.bin")).unwrap();
    rerun_from_sidecar(d, "d.bin.meta.json");
    assert_eq!(std::fs::read(d.join("d.bin")).unwrap(), bytes);
}

#[test]
fn ttt_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["ttt", "simulate", "--games", "300", "--seed", "1", "--out", "d.bin"]);
    ok(d, &[
        "ttt", "train", "--data", "d.bin", "--out", "m.json", "--epochs", "4", "--seed", "2",
        "--eval-every", "2", "--eval-games", "20", "--eval-csv", "e.csv", "--loss-csv", "l.csv",
    ]);
    assert_eq!(read(d, "e.csv").lines().count(), 3);
    assert_eq!(read(d, "l.csv").lines().count(), 5);

    let eval = ["ttt", "eval", "--model", "m.json", "--games", "200", "--seed", "1"];
    let first = ok(d, &eval);
    assert!(first.starts_with("wins "));
    assert_eq!(ok(d, &eval), first);

    let probe = ok(d, &["ttt", "probe", "--model", "m.json", "--board", "0,0,0,0,-1,0,0,0,0", "--trials", "500", "--seed", "4"]);
    let rows: Vec<&str> = probe.lines().collect();
    assert_eq!(rows[0], "cell,frequency");
    assert_eq!(rows[5], "4,0");
    let total: f64 = rows[1..].iter().map(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);

    ok(d, &["ttt", "eval", "--model", "m.json", "--games", "10", "--seed", "1", "--log", "game.csv"]);
    assert!(read(d, "game.csv").lines().last().unwrap().starts_with("outcome,"));
}

#[test]
fn text_char_and_word_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c.txt"), "the cat sat on the mat and the cat ran to the hat ".repeat(3)).unwrap();
    ok(d, &["text", "train", "--corpus", "c.txt", "--mode", "char", "--out", "c.json", "--epochs", "2", "--seed", "1"]);
    let out = ok(d, &["text", "synth", "--model", "c.json", "--seed-text", "the cat", "--length", "20", "--seed", "5"]);
    assert_eq!(out.trim_end_matches('\n').chars().count(), 27);
    assert_eq!(ok(d, &["text", "synth", "--model", "c.json", "--seed-text", "the cat", "--length", "20", "--seed", "5"]), out);

    ok(d, &["text", "train", "--corpus", "c.txt", "--mode", "word", "--out", "w.json", "--epochs", "2", "--seed", "1"]);
    assert!(d.join("w.json.words").exists());
    let out = ok(d, &["text", "synth", "--model", "w.json", "--seed-text", "the cat sat on the mat", "--length", "4", "--seed", "5"]);
    assert_eq!(out.split_whitespace().count(), 10);
}

#[test]
fn bad_invocations_fail_fast() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        vec!["walker", "train", "--dim", "2"],
        vec!["walker", "train", "--dim", "5", "--out", "x.json"],
        vec!["walker", "run", "--model", "w.json", "--steps", "10", "--bogus", "1"],
        vec!["ttt", "eval", "--model", "missing.json", "--seed", "1"],
        vec!["ttt", "probe", "--model", "missing.json", "--board", "0,0"],
        vec!["frobnicate"],
    ] {
        let out = mcnn(d, &args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert!(!d.join("x.json").exists());
}
