//! Exit-code contract, reproducibility of primary artifacts, and file-format
//! behavior of the command-line interface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optcorr"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn bad_flags_exit_two() {
    let (code, _, _) = run(&["discover", "--cone", "banana"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["discover"]);
    assert_eq!(code, 2);
    let (code, _, stderr) = run(&["verify", "--suite", "nonexistent"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown suite"));
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn malformed_state_files_exit_two_with_named_invariant() {
    let dir = tempdir();
    let non_hermitian = dir.join("bad_herm.json");
    std::fs::write(
        &non_hermitian,
        r#"{"dims": [["A", 2], ["B", 1]], "matrix": [[[0.5, 0.0], [0.3, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&[
        "evaluate",
        "--measure",
        "Q",
        "--state-file",
        non_hermitian.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("Hermitian"), "stderr: {stderr}");

    let bad_trace = dir.join("bad_trace.json");
    std::fs::write(
        &bad_trace,
        r#"{"dims": [["A", 2], ["B", 1]], "matrix": [[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&[
        "evaluate",
        "--measure",
        "Q",
        "--state-file",
        bad_trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("trace"), "stderr: {stderr}");
}

#[test]
fn infinite_measure_alpha_exits_two() {
    let (code, _, stderr) = run(&["evaluate", "--alpha", "0,0,-1,0,0,0,0", "--named", "bell"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("infinite-measure"), "stderr: {stderr}");
}

#[test]
fn identical_config_gives_byte_identical_artifacts() {
    let dir = tempdir();
    let out1 = dir.join("rays1.json");
    let out2 = dir.join("rays2.json");
    for out in [&out1, &out2] {
        let (code, _, _) = run(&[
            "discover",
            "--cone",
            "10",
            "--finite",
            "--classify",
            "--format",
            "json",
            "--seed",
            "11",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "discover artifacts must be byte-identical");

    let est1 = dir.join("est1.json");
    let est2 = dir.join("est2.json");
    for out in [&est1, &est2] {
        let (code, _, _) = run(&[
            "evaluate",
            "--measure",
            "R",
            "--named",
            "classical:0.5,0.5",
            "--dv",
            "2",
            "--seed",
            "3",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(
        std::fs::read(&est1).unwrap(),
        std::fs::read(&est2).unwrap(),
        "evaluate artifacts must be byte-identical"
    );
}

#[test]
fn artifacts_embed_config_and_version() {
    let dir = tempdir();
    let out = dir.join("rays.csv");
    let (code, _, _) = run(&[
        "discover",
        "--cone",
        "00",
        "--format",
        "csv",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# version: optcorr "));
    assert!(text.contains("# config: "));
    assert!(text.contains("cone,alpha_A,alpha_B,alpha_V,alpha_AB,alpha_AV,alpha_BV,alpha_ABV"));
    assert!(text.contains("00,0,0,1,0,0,0,0"));

    let est = dir.join("est.json");
    let (code, _, _) = run(&[
        "evaluate",
        "--measure",
        "Q",
        "--named",
        "bell",
        "--dv",
        "2",
        "--output",
        est.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&est).unwrap()).unwrap();
    assert!(doc["version"].as_str().unwrap().starts_with("optcorr "));
    assert_eq!(doc["config"]["measure"], "Q");
    assert_eq!(doc["config"]["seed"], 0);
    assert!(doc["estimate"]["value"].is_f64());
    assert!(doc["estimate"]["witness"]["isometry_re"].is_array());
}

#[test]
fn classification_column_appears_when_requested() {
    let dir = tempdir();
    let out = dir.join("classified.csv");
    let (code, _, _) = run(&[
        "discover",
        "--cone",
        "10",
        "--finite",
        "--classify",
        "--format",
        "csv",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("classification"));
    assert!(text.contains("nontrivial-candidate"));
    assert!(text.contains("mutual-information-candidate"));
}

#[test]
fn dumped_state_round_trips_through_evaluate() {
    let dir = tempdir();
    let state = dir.join("state.json");
    let (code, out1, _) = run(&[
        "evaluate",
        "--measure",
        "Q",
        "--named",
        "mixed-random:2,9",
        "--dv",
        "2",
        "--seed",
        "4",
        "--dump-state",
        state.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, out2, _) = run(&[
        "evaluate",
        "--measure",
        "Q",
        "--state-file",
        state.to_str().unwrap(),
        "--dv",
        "2",
        "--seed",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out1, out2, "file round trip must not change the estimate");
}

#[test]
fn dv_scan_reports_nonincreasing_upper_bounds() {
    let (code, stdout, _) = run(&[
        "evaluate",
        "--measure",
        "P",
        "--named",
        "classical:0.5,0.5",
        "--dv",
        "1",
        "--dv-scan",
        "1,2,4",
        "--seed",
        "2",
    ]);
    assert_eq!(code, 0);
    let values: Vec<f64> = stdout
        .lines()
        .filter(|l| l.trim_start().starts_with("d_V ="))
        .map(|l| {
            l.split("upper bound")
                .nth(1)
                .unwrap()
                .trim()
                .trim_end_matches(" bits")
                .parse()
                .unwrap()
        })
        .collect();
    assert_eq!(values.len(), 3);
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{values:?}");
}

#[test]
fn reference_style_tables_are_written() {
    let dir = tempdir();
    let tables_dir = dir.join("tables");
    let (code, _, _) = run(&[
        "discover",
        "--cone",
        "00",
        "--paper-tables",
        tables_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let t1 = std::fs::read_to_string(tables_dir.join("table_i.txt")).unwrap();
    let t2 = std::fs::read_to_string(tables_dir.join("table_ii.txt")).unwrap();
    for code_label in ["00", "10", "01", "11"] {
        assert!(t1.contains(code_label));
    }
    assert!(t2.contains("C∩00") && t2.contains("C∩10"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "optcorr-cli-test-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
