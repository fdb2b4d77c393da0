use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prodcheck::system::System;
use prodcheck::Caps;
use prodcheck_cli::verify::{verdicts, Fault};
use serde_json::Value;

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodcheck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn grid_reachability_is_true() {
    let g = sample("grid1.json");
    let o = run(&["check", path(&g), "Reach[{s1,s2}]((0,0),(1,1))"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("true"));

    let o = run(&["--json", "check", path(&g), "Reach[{s1}]((0,0),(1,1))"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], Value::Bool(false));
    assert!(v["micros"].is_u64());
}

#[test]
fn assignments_bind_free_variables() {
    let g = sample("grid1.json");
    let o = run(&["check", path(&g), "E s2 (x, y)", "--assign", "x=(1,0)", "--assign", "y=(1,1)"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["check", path(&g), "E s2 (x, y)", "--assign", "x=(1,0)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_formula_exits_two_with_position() {
    let o = run(&["check", path(&sample("grid1.json")), "exists x. (x = "]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("1:"), "{err}");
}

#[test]
fn cap_errors_exit_three_and_name_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let caps = dir.path().join("caps.json");
    std::fs::write(&caps, r#"{"tuples": 1000}"#).unwrap();
    let o = run(&[
        "--caps",
        path(&caps),
        "check",
        path(&sample("grid1.json")),
        "TC[a,b,c;d,e,f: !(a = d)](x,x,x,y,y,y)",
        "--assign",
        "x=(0,0)",
        "--assign",
        "y=(1,1)",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("tuples"));
}

#[test]
fn compose_splits_a_local_edge() {
    let o = run(&["compose", path(&sample("handshake.json")), "E req (x, y)"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["psi"][0][0]["formula"], "E req (x,y)");
    assert_eq!(v["psi"][1][0]["formula"], "x = y");
    let alpha = v["alpha"].as_str().unwrap();
    assert!(alpha.contains("p0(") && alpha.contains(" & p1("), "{alpha}");
}

#[test]
fn compose_rejects_wide_closures() {
    let o = run(&["compose", path(&sample("handshake.json")), "TC[a,b;c,d: E req (a,c)](x,y,x,y)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("FO(TC)"));
}

#[test]
fn random_verification_agrees_and_is_deterministic() {
    let hs = sample("handshake.json");
    let args = ["--seed", "7", "verify-compose", path(&hs), "--random", "200"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("200/200 agree"));

    let a = run(&["--json", "--seed", "11", "verify-compose", "--random", "60"]);
    let b = run(&["--json", "--seed", "11", "verify-compose", "--random", "60"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["items"], 60);
    assert_eq!(v["agree"], 60);
}

#[test]
fn sentence_files_are_checked_on_every_system() {
    let o = run(&["verify-compose", path(&sample("handshake.json")), "--formulas", path(&sample("sentences.txt"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("4/4 agree"));
}

#[test]
fn corrupted_profile_yields_a_replayable_counterexample() {
    let o = run(&["--json", "--seed", "7", "verify-compose", "--random", "200", "--corrupt-profile"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cx = &v["counterexamples"][0];
    let sys = System::from_json(&cx["system"].to_string()).unwrap();
    let f = prodcheck::parse_formula(cx["formula"].as_str().unwrap()).unwrap();
    let caps = Caps::default();
    let bad = verdicts(&sys, &f, Fault::IndTooSmall, &caps).unwrap();
    assert_ne!(bad.composed, bad.oracle);
    let good = verdicts(&sys, &f, Fault::None, &caps).unwrap();
    assert_eq!(good.composed, good.oracle);
}

#[test]
fn tm_gadget_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gadget", "tm-gtrs", path(&sample("halt1.json")), "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let t = std::fs::read_to_string(dir.path().join("transcript.txt")).unwrap();
    assert!(t.contains("φ_halt: true at depth 4"), "{t}");
    for f in ["gtrs.json", "star.json", "phi_halt.txt", "product.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let gtrs = std::fs::read_to_string(dir.path().join("gtrs.json")).unwrap();
    prodcheck::gadgets::Gtrs::from_json(&gtrs).unwrap();

    let o = run(&["gadget", "tm-gtrs", path(&sample("walker.json")), "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("φ_halt: false at every depth ≤ 20"));
}

#[test]
fn pda_and_arithmetic_gadgets() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gadget", "2pda-split", path(&sample("twopda.json")), "-o", path(dir.path()), "--word", "a,b"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("900/900 agree"));
    System::from_json(&std::fs::read_to_string(dir.path().join("split.json")).unwrap()).unwrap();

    let o = run(&["gadget", "grid-arith", "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["plus", "square_pairs", "square"] {
        for suffix in ["", "_grid"] {
            let text = std::fs::read_to_string(dir.path().join(format!("{name}{suffix}.txt"))).unwrap();
            prodcheck::parse_formula(text.trim()).unwrap();
        }
    }
}

#[test]
fn translate_gadget_checks_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gadget", "translate", "--formula", "Reach[{s1}](x, y)", "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("625/625 assignments agree"));
    let o = run(&[
        "gadget",
        "translate",
        "--direction",
        "n-to-grid",
        "--formula",
        "Reach[{s}](x, y)",
        "-o",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("translated.txt")).unwrap().trim(), "Reach[{s1}](x,y)");
}

#[test]
fn classes_and_product_outputs() {
    let hs = sample("handshake.json");
    let o = run(&["--json", "classes", path(&hs)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[0]["ind"], 1);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("product.json");
    let o = run(&["product", path(&hs), "-o", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["check", path(&p), "exists x. exists y. E (send,acc) (x, y)"]);
    assert_eq!(o.status.code(), Some(0));
}
