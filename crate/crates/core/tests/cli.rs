use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn qhex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhex"))
        .args(args)
        .output()
        .expect("run qhex")
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON summary on stdout")
}

fn arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn usage_errors_have_their_own_exit_code() {
    assert_eq!(qhex(&["moments", "--N", "3"]).status.code(), Some(2));
    assert_eq!(qhex(&["moments", "--N", "3", "--c", "1", "--q", "2"]).status.code(), Some(2));
    assert_eq!(qhex(&["moments", "--N", "3", "--q", "1/0"]).status.code(), Some(2));
    assert_eq!(qhex(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qhex(&["levelsets", "--c", "1", "--s", "100"]).status.code(), Some(2));
}

#[test]
fn degenerate_q_is_rejected() {
    assert_eq!(qhex(&["op-check", "--N", "2", "--q", "1"]).status.code(), Some(2));
    assert_eq!(qhex(&["kernel", "--N", "2", "--q", "-3/2"]).status.code(), Some(2));
}

#[test]
fn failed_hard_check_exits_with_one() {
    let out = qhex(&["sample", "--N", "2", "--q", "13/10", "--sweeps", "20", "--burn-in", "0", "--tv-tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(summary(&out)["pass"], Value::Bool(false));
}

#[test]
fn outputs_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let csv = dir.path().join(format!("k{tag}.csv"));
        let json = dir.path().join(format!("k{tag}.json"));
        let out = qhex(&["kernel", "--N", "2", "--q", "13/10", "--csv", arg(&csv), "--json", arg(&json)]);
        assert!(out.status.success());
        (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap())
    };
    let (c1, j1) = run("a");
    let (c2, j2) = run("b");
    assert_eq!(c1, c2);
    let strip = |b: &[u8]| {
        let mut v: Value = serde_json::from_slice(b).unwrap();
        v["outputs"] = Value::Null;
        v
    };
    assert_eq!(strip(&j1), strip(&j2));
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"command": "moments", "N": 2, "q": "3/2"}"#).unwrap();
    let from_file = summary(&qhex(&["--config", arg(&cfg)]));
    assert_eq!(from_file["results"]["n"], 2);
    let overridden = summary(&qhex(&["--config", arg(&cfg), "moments", "--N", "3"]));
    assert_eq!(overridden["results"]["n"], 3);
    assert_eq!(overridden["results"]["moments"].as_array().unwrap().len(), 6);
}

#[test]
fn describe_lists_figures() {
    let out = qhex(&["arctic", "--describe"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("arctic"));
    assert!(text.contains("Figure"));
}

#[test]
fn arctic_ellipse_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("a.svg");
    let out = qhex(&["--threads", "2", "arctic", "--c", "0.01", "--check-ellipse", "--rays", "90", "--svg", arg(&svg)]);
    assert!(out.status.success());
    let s = summary(&out);
    let ellipse = s["checks"].as_array().unwrap().iter().find(|c| c["name"].as_str().unwrap().starts_with("ellipse"));
    assert_eq!(ellipse.unwrap()["pass"], true);
    assert!(std::fs::read_to_string(svg).unwrap().contains("<svg"));
}

#[test]
fn render_redraws_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("z.json");
    let svg = dir.path().join("z.svg");
    assert!(qhex(&["zeros", "--c", "1", "--N", "12", "--json", arg(&json)]).status.success());
    assert!(qhex(&["render", "--input", arg(&json), "--svg", arg(&svg)]).status.success());
    assert!(std::fs::read_to_string(svg).unwrap().contains("<circle"));
}
