//! End-to-end runs of the `molcurate` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TOY: &str = include_str!("fixtures/toy_source.tsv");

fn molcurate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molcurate")).args(args).output().expect("spawn molcurate")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn toy(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("toy.tsv");
    std::fs::write(&p, TOY).unwrap();
    p
}

/// Runs the full pipeline on the toy source and returns the kept file.
fn kept(dir: &TempDir) -> PathBuf {
    let (input, out) = (toy(dir), dir.path().join("kept.tsv"));
    let o = molcurate(&["run", "--in", s(&input), "--out", s(&out)]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn run_removes_one_record_per_stage() {
    let dir = TempDir::new().unwrap();
    let (input, out, ledger) = (toy(&dir), dir.path().join("kept.tsv"), dir.path().join("ledger.json"));
    let o = molcurate(&["run", "--in", s(&input), "--out", s(&out), "--ledger", s(&ledger)]);
    assert_eq!(code(&o), 2);
    let row = &json(&ledger)["sources"][0];
    assert_eq!(row["source"], "toy");
    assert_eq!(row["initial"], 10);
    assert_eq!(row["final"], 7);
    for stage in ["preprocessing", "standardization", "filtering"] {
        assert_eq!(row["removed"][stage], 1, "{stage}");
    }
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 8);
    let quarantine = std::fs::read_to_string(dir.path().join("kept.tsv.quarantine.tsv")).unwrap();
    assert_eq!(quarantine.lines().count(), 4);
}

#[test]
fn clean_input_exits_zero() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("clean.tsv");
    std::fs::write(&input, "source\tsource_id\tsmiles\nx\t1\tCCO\nx\t2\tOCC\nx\t3\tc1ccccc1\n").unwrap();
    let (out, ledger) = (dir.path().join("kept.tsv"), dir.path().join("ledger.json"));
    let o = molcurate(&["run", "--in", s(&input), "--out", s(&out), "--ledger", s(&ledger)]);
    assert_eq!(code(&o), 0);
    let row = &json(&ledger)["sources"][0];
    assert_eq!(row["final"], 2);
    let dups: u64 = row["duplicates"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(dups, 1);
}

#[test]
fn subset_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = kept(&dir);
    let run = |tag: &str| {
        let (out, report) = (dir.path().join(format!("{tag}.tsv")), dir.path().join(format!("{tag}.json")));
        let o = molcurate(&[
            "subset", "--in", s(&input), "--m", "4", "--t", "0.9", "--seed", "7", "--out", s(&out), "--report", s(&report),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(out).unwrap(), std::fs::read(report).unwrap())
    };
    let first = run("a");
    assert_eq!(first, run("b"));
    assert_eq!(String::from_utf8(first.0).unwrap().lines().count(), 5);
}

#[test]
fn ncircles_reports_raw_and_normalized() {
    let dir = TempDir::new().unwrap();
    let input = kept(&dir);
    let report = dir.path().join("nc.json");
    let o = molcurate(&["ncircles", "--in", s(&input), "--t", "0.75", "--report", s(&report)]);
    assert_eq!(code(&o), 0);
    let r = json(&report);
    assert_eq!(r["t"], 0.75);
    assert_eq!(r["n"], 7);
    let raw = r["raw"].as_u64().unwrap();
    assert!((1..=7).contains(&raw));
    assert!((r["normalized"].as_f64().unwrap() - raw as f64 / 7.0).abs() < 1e-12);
    assert!(r["greedy_raw"].as_u64().unwrap() <= raw);
}

#[test]
fn config_values_yield_to_flags() {
    let dir = TempDir::new().unwrap();
    let input = kept(&dir);
    let config = dir.path().join("molcurate.conf");
    std::fs::write(&config, "# defaults\nt = 0.5\n").unwrap();
    let t_of = |extra: &[&str]| {
        let report = dir.path().join("nc.json");
        let mut args = vec!["--config", s(&config), "ncircles", "--in", s(&input), "--report", s(&report)];
        args.extend(extra);
        assert_eq!(code(&molcurate(&args)), 0);
        json(&report)["t"].as_f64().unwrap()
    };
    assert_eq!(t_of(&[]), 0.5);
    assert_eq!(t_of(&["--t", "0.8"]), 0.8);
    std::fs::write(&config, "seed = 3\n").unwrap();
    assert_eq!(code(&molcurate(&["--config", s(&config), "summary", "--in", s(&input)])), 1);
}

#[test]
fn usage_and_input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let input = toy(&dir);
    let out = dir.path().join("x.tsv");
    let bogus = molcurate(&["frobnicate"]);
    assert_eq!(code(&bogus), 1);
    assert!(!bogus.stderr.is_empty());
    assert_eq!(code(&molcurate(&["subset", "--in", s(&input), "--m", "2", "--out", s(&out)])), 1);
    assert_eq!(code(&molcurate(&["stats", "--a", s(&input), "--b", s(&input)])), 1);
    assert_eq!(code(&molcurate(&["run", "--in", "/nonexistent/in.tsv", "--out", s(&out)])), 1);
    assert_eq!(code(&molcurate(&["filters", "--in", s(&input), "--filter", "no-such-filter"])), 1);
}

#[test]
fn version_lists_table_checksums() {
    let o = molcurate(&["--version"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with(&format!("molcurate {}", env!("CARGO_PKG_VERSION"))));
    let tables: Vec<&str> = text.lines().skip(1).collect();
    assert!(!tables.is_empty());
    for line in tables {
        let sha = line.rsplit("sha256 ").next().unwrap();
        assert_eq!(sha.len(), 64, "{line}");
        assert!(sha.bytes().all(|b| b.is_ascii_hexdigit()));
    }
}

#[test]
fn commands_leave_inputs_untouched() {
    let dir = TempDir::new().unwrap();
    let input = toy(&dir);
    let kept = kept(&dir);
    let before = (std::fs::read(&input).unwrap(), std::fs::read(&kept).unwrap());
    let [m, f, r, i] = ["m.tsv", "f.tsv", "s.json", "i.tsv"].map(|name| dir.path().join(name));
    let runs: [Vec<&str>; 5] = [
        vec!["merge", "--in", s(&kept), "--in", s(&kept), "--out", s(&m)],
        vec!["filters", "--in", s(&kept), "--out", s(&f)],
        vec!["summary", "--in", s(&kept), "--report", s(&r)],
        vec!["stats", "--a", s(&kept), "--b", s(&kept), "--pairs", "50", "--seed", "1"],
        vec!["ingest", "--in", s(&input), "--out", s(&i)],
    ];
    for args in runs {
        let o = molcurate(&args);
        assert_ne!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(before, (std::fs::read(&input).unwrap(), std::fs::read(&kept).unwrap()));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = TempDir::new().unwrap();
    let input = toy(&dir);
    let outputs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|n| {
            let out = dir.path().join(format!("kept-{n}.tsv"));
            molcurate(&["--threads", n, "run", "--in", s(&input), "--out", s(&out), "--chunk-rows", "2"]);
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}
