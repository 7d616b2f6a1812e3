use std::process::{Command, Output};

use serde_json::Value;

fn nsf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsf"))
        .args(args)
        .env_remove("NSF_FUEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("nsf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_accepts_the_corpus_and_reports_unbound_names() {
    let ok = nsf(&["check", "uwkl", "mu", "kral", "her_uwkl", "arith"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    let bad = temp_file("bad.nsf", "var f : 1\nformula a := f n = 0\n");
    let out = nsf(&["check", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("`n`"), "{}", stdout(&out));

    let empty = temp_file("empty.nsf", "");
    let out = nsf(&["check", &empty]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("warning"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(nsf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        nsf(&["translate", "no_such_file", "x"]).status.code(),
        Some(2)
    );
    let unknown = nsf(&["translate", "mu", "nothing_here"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("nothing_here"));
    assert_eq!(nsf(&["demo", "nope"]).status.code(), Some(2));
    assert_eq!(
        nsf(&["eval", "arith", "--fuel", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(nsf(&["--help"]).status.code(), Some(0));
}

#[test]
fn translate_prints_the_normal_form_and_trace() {
    let out = nsf(&["translate", "pi01_trans", "pi01_trans"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("forall^st"), "{text}");
    assert_eq!(text.lines().count(), 1);

    let atom = nsf(&["translate", "axioms", "internal_atom"]);
    assert_eq!(stdout(&atom).trim(), "forall x:0. phi0 x x = 0");

    let traced = nsf(&["translate", "axioms", "not_standard", "--trace"]);
    let text = stdout(&traced);
    assert!(text.contains("[negation] ~(st("), "{text}");
    assert!(text.lines().next().unwrap().contains("!="), "{text}");
}

#[test]
fn text_output_is_deterministic() {
    for args in [
        vec!["translate", "kral", "kral", "--trace"],
        vec!["herbrandize", "her_uwkl", "ante", "cons", "--pointwise"],
        vec!["demo", "ext", "--depth", "3"],
        vec!["corpus"],
    ] {
        let a = nsf(&args);
        let b = nsf(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn json_output_carries_the_documented_fields() {
    let out = nsf(&["--format", "json", "translate", "kral2", "kral2", "--trace"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["rendering"].is_string());
    for step in v["trace"].as_array().unwrap() {
        for key in ["rule", "before", "after"] {
            assert!(step[key].is_string(), "{key}");
        }
    }

    let out = nsf(&["demo", "uwkl-from-mu", "--depth", "3", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &v[0];
    for key in ["case", "D", "instances", "violations", "runtime_ms"] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert_eq!(r["instances"], 677);

    let out = nsf(&["corpus", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["fixed_points"].as_u64().unwrap() >= 10);
}

#[test]
fn herbrandize_emits_every_stage() {
    let out = nsf(&["herbrandize", "her_uwkl", "ante", "cons", "--pointwise"]);
    let text = stdout(&out);
    for label in ["C-form:", "D-form:", "obligation:", "s-form:", "HER:"] {
        assert!(text.contains(label), "{label} missing from\n{text}");
    }
    let explicit = nsf(&[
        "herbrandize",
        "her_uwkl",
        "ante",
        "cons",
        "--pointwise",
        "--partition",
        "T|U,S,k",
        "--output",
        "n",
    ]);
    assert_eq!(explicit.stdout, out.stdout);

    let bad = nsf(&[
        "herbrandize",
        "her_uwkl",
        "ante",
        "cons",
        "--pointwise",
        "--partition",
        "T|U,S",
    ]);
    assert_eq!(bad.status.code(), Some(2));

    let plain = nsf(&["herbrandize", "pi01_trans", "-", "pi01_trans_nf"]);
    let text = stdout(&plain);
    assert!(
        text.contains("obligation: forall f:1. exists n:0 in t f."),
        "{text}"
    );
}

#[test]
fn obligation_collapse_reports_monotonicity() {
    let ok = nsf(&["obligation", "her_uwkl", "cons", "--collapse", "n"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("maxseq"));
    let bad = nsf(&[
        "obligation",
        "pi01_trans",
        "pi01_trans_nf",
        "--collapse",
        "n",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("cannot collapse"));
}

#[test]
fn eval_respects_fuel_from_flag_and_environment() {
    let out = nsf(&["eval", "arith"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("product : 0 = 408"));

    let starved = nsf(&["eval", "arith", "--fuel", "10"]);
    assert_eq!(starved.status.code(), Some(1));
    assert!(stdout(&starved).contains("out of fuel"));

    let env = Command::new(env!("CARGO_BIN_EXE_nsf"))
        .args(["eval", "arith"])
        .env("NSF_FUEL", "10")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(1));

    let single = temp_file("one.term", "mul 6 7\n");
    let out = nsf(&["eval", &single]);
    assert!(stdout(&out).contains("= 42"), "{}", stdout(&out));
}

#[test]
fn demos_pass_and_fan_reports_deep_trees() {
    let out = nsf(&["demo", "mu-from-uwkl", "--depth", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("32/32 pass"));
    let fan = nsf(&["demo", "fan", "--depth", "5"]);
    assert_eq!(fan.status.code(), Some(0));
    assert!(
        stdout(&fan).contains("stays in the tree"),
        "{}",
        stdout(&fan)
    );
}
