use std::process::{Command, Output};

fn wittcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittcheck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn proposition_on_gaussian_passes() {
    let o = wittcheck(&[
        "--extension",
        "quadratic-gaussian",
        "--m",
        "1",
        "--trials",
        "200",
        "--seed",
        "7",
        "--suites",
        "proposition",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v["suites"][0];
    assert_eq!(s["suite"], "proposition");
    for key in ["p", "t", "m", "trials", "passes", "failures", "skipped"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
    assert_eq!((s["passes"].as_u64(), s["failures"].as_u64()), (Some(200), Some(0)));
}

#[test]
fn sqrt2_at_level_one_is_a_negative_control() {
    let o = wittcheck(&[
        "verify",
        "--extension",
        "quadratic-sqrt2",
        "--m",
        "1",
        "--suites",
        "proposition",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v["suites"][0];
    assert_eq!(s["status"], "info");
    assert_eq!(s["details"]["witness"], "(pi_L, -1)");
    assert_eq!(s["witness"], serde_json::json!([[0, 1], [-1, 0]]));
}

#[test]
fn guard_violation_exits_2() {
    let o = wittcheck(&["--extension", "quadratic-sqrt2", "--precision", "2", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision guard"));
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(wittcheck(&["--extension", "nowhere"]).status.code(), Some(2));
    assert_eq!(wittcheck(&["--extension", "quadratic-sqrt2", "--suites", "bogus"]).status.code(), Some(2));
    assert_eq!(wittcheck(&["--extension", "quadratic-sqrt2", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(wittcheck(&["--m", "1"]).status.code(), Some(2));
    assert_eq!(wittcheck(&["--spec-file", "/does/not/exist.toml"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = wittcheck(&[
            "--extension",
            "quadratic-sqrt2",
            "--seed",
            "7",
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn csv_has_one_row_per_check() {
    let o = wittcheck(&[
        "--extension",
        "cyclotomic-step",
        "--suites",
        "h1,trace-lemmas",
        "--format",
        "csv",
        "--trials",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "suite,extension,check,p,precision,t,m,trials,passes,failures,skipped,status");
    assert!(lines[1].starts_with("trace-lemmas,cyclotomic-step-p3,"));
    assert_eq!(lines.len(), 1 + 2 + 3);
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn spec_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sqrt2.toml");
    std::fs::write(
        &path,
        "kind = \"custom\"\np = 2\nprecision = 32\ne_k = 1\nek = [\"-2\"]\nel = [[\"-2\"], [\"0\"]]\nsigma_pi = [[\"0\"], [\"-1\"]]\n",
    )
    .unwrap();
    let o = wittcheck(&["extension-info", "--spec-file", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["t"].as_u64(), v["d"].as_u64(), v["e_L"].as_u64()), (Some(2), Some(1), Some(2)));

    let o = wittcheck(&["--spec-file", path.to_str().unwrap(), "--suites", "h1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suites"][0]["details"]["order"], "2");

    std::fs::write(
        &path,
        "kind = \"custom\"\np = 2\nek = [\"-2\"]\nel = [[\"-3\"], [\"0\"]]\nsigma_pi = [[\"0\"], [\"-1\"]]\n",
    )
    .unwrap();
    let o = wittcheck(&["extension-info", "--spec-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_L"));
}

#[test]
fn extension_info_text() {
    let o = wittcheck(&["extension-info", "--extension", "quadratic-gaussian"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("t 1\n") && text.contains("d 1\n") && text.contains("e_K 1\n"));
}

#[test]
fn witt_poly_exports() {
    let o = wittcheck(&["witt-poly", "--p", "2", "--level", "1", "--which", "z"]);
    assert_eq!(o.status.code(), Some(0));
    let mut lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    lines.sort();
    assert_eq!(lines, vec!["-1 0:0^1 1:0^1", "1 0:1^1", "1 1:1^1"]);

    let f0 = wittcheck(&["witt-poly", "--p", "3", "--level", "0", "--which", "f"]);
    assert_eq!((f0.status.code(), stdout(&f0)), (Some(0), String::new()));
    let g = wittcheck(&["witt-poly", "--p", "2", "--level", "1", "--which", "g"]);
    assert_eq!((g.status.code(), stdout(&g)), (Some(0), String::new()));

    assert_eq!(wittcheck(&["witt-poly", "--p", "3", "--level", "3", "--arity", "3"]).status.code(), Some(2));
    assert_eq!(wittcheck(&["witt-poly", "--p", "2", "--level", "1", "--which", "q"]).status.code(), Some(2));
}

#[test]
fn timings_are_opt_in() {
    let plain = wittcheck(&["--extension", "quadratic-gaussian", "--suites", "h1", "--format", "json"]);
    assert!(!stdout(&plain).contains("timing_ms"));
    let timed = wittcheck(&["--extension", "quadratic-gaussian", "--suites", "h1", "--format", "json", "--timings"]);
    assert!(stdout(&timed).contains("timing_ms"));
}
