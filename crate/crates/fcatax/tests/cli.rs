//! End-to-end runs of the `fcatax` binary: golden-file comparisons on
//! the toy context, the exit-code contract, and determinism across
//! repeated runs and thread counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcatax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn assert_matches_golden(produced: &Path, golden_name: &str) {
    let got = fs::read(produced).expect("output file exists");
    let want = fs::read(fixture(golden_name)).expect("golden file exists");
    assert_eq!(
        got,
        want,
        "{} differs from {golden_name}",
        produced.display()
    );
}

fn manifest_for(output: &Path) -> serde_json::Value {
    let mut name = output.file_name().unwrap().to_os_string();
    name.push(".manifest.json");
    let text = fs::read_to_string(output.with_file_name(name)).expect("manifest exists");
    serde_json::from_str(&text).expect("manifest is JSON")
}

#[test]
fn build_context_round_trips_the_toy_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy.cxt");
    let result = run(&[
        "build-context",
        fixture("toy_external.csv").to_str().unwrap(),
        "--config",
        fixture("toy_config.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    assert_eq!(stdout(&result), "context: 3 objects, 3 attributes\n");
    assert_matches_golden(&out, "toy.cxt");

    let manifest = manifest_for(&out);
    assert_eq!(manifest["command"], "build-context");
    assert_eq!(manifest["config"]["min_sessions"], 20);
    assert_eq!(manifest["config"]["rejected_rows"], 0);
    assert_eq!(manifest["outputs"][0], out.to_str().unwrap());
}

#[test]
fn lattice_output_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lattice.json");
    let result = run(&[
        "lattice",
        fixture("toy.cxt").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    assert_eq!(stdout(&result), "concepts: 4\n");
    assert_matches_golden(&out, "golden/toy_lattice.json");
    assert_eq!(manifest_for(&out)["concept_count"], 4);
}

#[test]
fn stability_output_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stability.json");
    let result = run(&[
        "stability",
        fixture("toy.cxt").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    assert_eq!(stdout(&result), "concepts: 4\n");
    assert_matches_golden(&out, "golden/toy_stability.json");
}

#[test]
fn select_top_stability_matches_goldens() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("top2.dot");
    let json = dir.path().join("top2.json");
    let result = run(&[
        "select",
        fixture("toy.cxt").to_str().unwrap(),
        "--top-stability",
        "2",
        "--dot",
        dot.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    assert_eq!(stdout(&result), "selected: 2\n");
    assert_matches_golden(&dot, "golden/toy_top2_stability.dot");
    assert_matches_golden(&json, "golden/toy_top2_stability.json");

    let manifest = manifest_for(&dot);
    assert_eq!(manifest["criterion"]["kind"], "top_k_stability");
    assert_eq!(manifest["criterion"]["exclude_extremes"], true);
}

#[test]
fn compare_reports_ranking_overlap() {
    let toy = fixture("toy.cxt");
    let toy = toy.to_str().unwrap();

    let result = run(&["compare", toy, "2"]);
    assert!(result.status.success());
    assert_eq!(
        stdout(&result),
        "jaccard: 0.333333333333\ncommon: c3\nonly-extent: c1\nonly-stability: c0\n"
    );

    let result = run(&["compare", toy, "4"]);
    assert_eq!(
        stdout(&result),
        "jaccard: 1\ncommon: c0 c1 c2 c3\nonly-extent: (none)\nonly-stability: (none)\n"
    );

    let result = run(&["compare", toy, "1"]);
    assert_eq!(
        stdout(&result),
        "jaccard: 0\ncommon: (none)\nonly-extent: c3\nonly-stability: c0\n"
    );
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let result = run(&["lattice", "/definitely/not/here.cxt", "--out", "/tmp/x.json"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(
        stderr(&result).contains("/definitely/not/here.cxt"),
        "stderr: {}",
        stderr(&result)
    );
}

#[test]
fn corrupt_cxt_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cxt");
    fs::write(&bad, "B\n\nzzz\n").unwrap();
    let result = run(&["lattice", bad.to_str().unwrap(), "--out", "/tmp/x.json"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(stderr(&result).contains("line 3"), "stderr: {}", stderr(&result));
}

#[test]
fn conflicting_or_missing_criteria_exit_2() {
    let toy = fixture("toy.cxt");
    let toy = toy.to_str().unwrap();

    let conflict = run(&[
        "select", toy, "--iceberg", "1", "--top-extent", "2", "--dot", "/tmp/a.dot", "--out",
        "/tmp/a.json",
    ]);
    assert_eq!(conflict.status.code(), Some(2));

    let missing = run(&["select", toy, "--dot", "/tmp/a.dot", "--out", "/tmp/a.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let extremes = run(&[
        "select", toy, "--top-stability", "2", "--exclude-extremes", "--include-extremes",
        "--dot", "/tmp/a.dot", "--out", "/tmp/a.json",
    ]);
    assert_eq!(extremes.status.code(), Some(2));
}

#[test]
fn empty_selection_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("empty.dot");
    let json = dir.path().join("empty.json");
    let result = run(&[
        "select",
        fixture("toy.cxt").to_str().unwrap(),
        "--stability-gt",
        "1.0",
        "--dot",
        dot.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert!(stderr(&result).contains("selection is empty"));
    assert_eq!(
        fs::read_to_string(&dot).unwrap(),
        "digraph concepts {\n  rankdir=BT;\n  node [shape=box];\n}\n"
    );
}

#[test]
fn concept_capacity_exits_4() {
    let result = run(&[
        "lattice",
        fixture("toy.cxt").to_str().unwrap(),
        "--max-concepts",
        "2",
        "--out",
        "/tmp/x.json",
    ]);
    assert_eq!(result.status.code(), Some(4));
    assert!(stderr(&result).contains("limit 2"), "stderr: {}", stderr(&result));
}

#[test]
fn empty_ingest_result_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("tiny.csv");
    fs::write(
        &log,
        "user_id,site,first_visit,last_visit,sessions\ng1,m1,100,200,3\n",
    )
    .unwrap();
    let result = run(&[
        "build-context",
        log.to_str().unwrap(),
        "--out",
        dir.path().join("tiny.cxt").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3));
    assert!(stderr(&result).contains("empty context"));
}

#[test]
fn rejected_rows_warn_but_do_not_abort() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("messy.csv");
    fs::write(
        &log,
        "user_id,site,first_visit,last_visit,sessions\n\
         g1,m1,100,200,25\n\
         g1,m2,300,200,25\n\
         g2,m2,100,200,25\n",
    )
    .unwrap();
    let out = dir.path().join("messy.cxt");
    let result = run(&[
        "build-context",
        log.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    assert!(
        stderr(&result).contains("rejected line 3"),
        "stderr: {}",
        stderr(&result)
    );
    assert_eq!(stdout(&result), "context: 2 objects, 2 attributes\n");
    assert_eq!(manifest_for(&out)["config"]["rejected_rows"], 1);
}

#[test]
fn repeated_runs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let toy = fixture("toy.cxt");
    let toy = toy.to_str().unwrap();

    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "3"].iter().enumerate() {
        let json = dir.path().join(format!("s{i}.json"));
        let dot = dir.path().join(format!("s{i}.dot"));
        let result = run(&[
            "select", toy, "--threads", threads, "--iceberg", "1", "--dot",
            dot.to_str().unwrap(), "--out", json.to_str().unwrap(),
        ]);
        assert!(result.status.success());
        outputs.push((fs::read(&json).unwrap(), fs::read(&dot).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}
