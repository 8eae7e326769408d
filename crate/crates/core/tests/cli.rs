use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tsbounds"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr_tag(o: &Output) -> String {
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1, "stderr: {err}");
    err.split(']').next().unwrap().trim_start_matches("error[").to_string()
}

#[test]
fn bundled_integer_example_verifies_with_nonnegative_margins() {
    let o = run(&["verify", scenario("thm1_int.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,u,bound,margin,in_domain"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        assert!(cols[3].parse::<f64>().unwrap() >= 0.0, "{line}");
        assert_eq!(cols[4], "true");
        rows += 1;
    }
    assert_eq!(rows, 9);
}

#[test]
fn every_bundled_scenario_runs() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(scenario("")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mode = doc["mode"].as_str().unwrap();
        let out = dir.path().join("out.csv");
        let o = run(&[mode, path.to_str().unwrap(), "--output", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        assert!(std::fs::read_to_string(&out).unwrap().lines().count() > 1);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [("sweep", "sweep.json"), ("bound", "thm3_hgrid.json"), ("converge", "converge.json")] {
        let mut outputs = Vec::new();
        for run_no in 0..2 {
            let out = dir.path().join(format!("{cmd}{run_no}.csv"));
            let o = run(&[cmd, scenario(file).to_str().unwrap(), "-o", out.to_str().unwrap()]);
            assert!(o.status.success());
            outputs.push(std::fs::read(out).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{cmd}");
    }
}

#[test]
fn missing_file_exits_two() {
    let o = run(&["bound", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_tag(&o), "file-not-found");
}

#[test]
fn malformed_scenarios_exit_two_with_line_context() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"version\": 1,\n  \"theorem\": \"thm1\",\n  \"colour\": 3\n}\n").unwrap();
    let o = run(&["bound", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_tag(&o), "json");
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    std::fs::write(&p, r#"{"version":1,"scale":{"kind":"integer","a":0,"b":4},"theorem":"thm1","k":"1+"}"#).unwrap();
    let o = run(&["bound", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_tag(&o), "parse");
}

#[test]
fn hypothesis_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    // a decreasing
    std::fs::write(&p, r#"{"version":1,"scale":{"kind":"integer","a":0,"b":4},"theorem":"thm1","k":"1","a":"5-t"}"#).unwrap();
    let o = run(&["bound", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_tag(&o), "hypothesis");

    // Φ not subadditive
    std::fs::write(&p, r#"{"version":1,"scale":{"kind":"integer","a":0,"b":4},"theorem":"thm1","k":"1","Phi":"pow(x,2)"}"#).unwrap();
    let o = run(&["bound", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_tag(&o), "certificate");

    // F outside the envelope
    std::fs::write(
        &p,
        r#"{"version":1,"mode":"solve","scale":{"kind":"integer","a":0,"b":4},"F":"u*u","K":"u","u_a":2}"#,
    )
    .unwrap();
    let o = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_tag(&o), "envelope");
}

#[test]
fn check_fn_reports_certificates() {
    let o = run(&["check-fn", "x", "--props", "sub,submul,nondec,classS"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.contains(" PASS ")));

    let o = run(&["check-fn", "pow(x,2)", "--props", "sub,submul"]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("sub FAIL") && out.contains("witness=("));
    assert!(out.contains("submul PASS"));
}

#[test]
fn mode_mismatch_is_a_usage_error() {
    let o = run(&["bound", scenario("application.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_tag(&o), "mode");
}
