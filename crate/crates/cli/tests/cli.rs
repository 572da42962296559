use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn ptga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptga")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_prints_value_and_certificate() {
    let o = ptga(&["solve", &fixture("bias.tga")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "value = 1/2, certificate: ok\n");
}

#[test]
fn decide_is_strict() {
    let f = fixture("bias.tga");
    let at = ptga(&["decide", &f, "--budget", "1/2"]);
    assert_eq!(at.status.code(), Some(0));
    assert_eq!(stdout(&at), "false\n");
    let above = ptga(&["decide", &f, "--budget", "3/4"]);
    assert_eq!(stdout(&above), "true\n");
}

#[test]
fn nonbinary_rates_fail_with_code() {
    let o = ptga(&["solve", &fixture("nonbinary.tga")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[ValidationFailed]: NonBinaryRate"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ptga(&[]).status.code(), Some(2));
    assert_eq!(ptga(&["decide", &fixture("bias.tga"), "--budget", "half"]).status.code(), Some(2));
    assert_eq!(ptga(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_files_are_reported() {
    let o = ptga(&["solve", "/nonexistent/arena.tga"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[IoError]"), "{}", stderr(&o));
}

#[test]
fn json_solution_has_the_documented_fields() {
    let o = ptga(&["solve", &fixture("bias.tga"), "--json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["value"], "1/2");
    assert_eq!(doc["scale"], 2);
    assert_eq!(doc["certificate"]["ok"], true);
    let vertices = doc["vertices"].as_array().unwrap();
    assert!(!vertices.is_empty());
    for v in vertices {
        for key in ["location", "val_region", "target_region", "gain", "bias"] {
            assert!(!v[key].is_null(), "{key} missing in {v}");
        }
    }
    assert!(!doc["strategies"]["min"].as_array().unwrap().is_empty());
    assert!(doc["strategies"]["max"].as_array().unwrap().is_empty());
}

#[test]
fn check_and_oracle_agree_on_the_fixture() {
    let f = fixture("bias.tga");
    let o = ptga(&["check", &f, "--samples", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("value = 1/2\nscale = 2\n"), "{text}");
    assert!(text.contains("optimality equations: ok"), "{text}");
    let o = ptga(&["oracle", &f]);
    assert_eq!(stdout(&o), "solver = 1/2\noracle = 1/2\nagree\n");
}

#[test]
fn dot_goes_to_stdout_or_file() {
    let f = fixture("bias.tga");
    let printed = stdout(&ptga(&["export-dot", &f]));
    assert!(printed.starts_with("digraph"), "{printed}");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    let o = ptga(&["export-dot", &f, "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("wrote "));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn finite_arenas_are_solved() {
    let o = ptga(&["finite-solve", &fixture("choice.json")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert_eq!(first, "s (max): gain = 1, bias = -1, move = right");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn regions_are_listed_in_order() {
    let o = ptga(&["regions", "--k", "2"]);
    assert_eq!(stdout(&o), "0: {0}\n1: (0,1)\n2: {1}\n3: (1,2)\n4: {2}\n");
}

#[test]
fn tight_scale_limits_are_errors() {
    let o = ptga(&["--max-scale", "1", "solve", &fixture("bias.tga")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[ScaleEscalationExceeded]"), "{}", stderr(&o));
}
