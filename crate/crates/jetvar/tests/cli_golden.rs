//! Criterion 9: golden-file byte equality for `el`, `christoffel`,
//! `strength`, and `ni` on the shipped example models, plus the exit-code
//! contract and JSON determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root")
}

fn jetvar(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jetvar"))
        .args(args)
        .current_dir(workspace_root())
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing golden {name}: {e}"))
}

fn check_golden(criterion: &str, args: &[&str], golden_name: &str, want_code: i32) {
    let out = jetvar(args);
    let stdout = String::from_utf8(out.stdout).expect("utf-8 output");
    assert_eq!(
        stdout,
        golden(golden_name),
        "{criterion}: output differs from tests/golden/{golden_name}"
    );
    assert_eq!(out.status.code(), Some(want_code), "{criterion}: exit code");
    println!("ACCEPT 9 ({criterion}): pass");
}

#[test]
fn criterion_9_el_golden() {
    check_golden("el", &["el", "models/wave.jv"], "el_wave.txt", 0);
    check_golden(
        "el sine-Gordon",
        &["el", "models/sine_gordon.jv"],
        "el_sine_gordon.txt",
        0,
    );
}

#[test]
fn criterion_9_christoffel_golden() {
    check_golden(
        "christoffel",
        &["christoffel", "models/sphere.jv"],
        "christoffel_sphere.txt",
        0,
    );
    check_golden(
        "christoffel standard convention",
        &["christoffel", "models/sphere.jv", "--convention", "standard"],
        "christoffel_sphere_standard.txt",
        0,
    );
}

#[test]
fn criterion_9_strength_golden() {
    check_golden(
        "strength",
        &["strength", "models/yang_mills_su2.jv"],
        "strength_su2.txt",
        0,
    );
}

#[test]
fn criterion_9_ni_golden() {
    check_golden("ni", &["ni", "models/maxwell3.jv"], "ni_maxwell.txt", 0);
    check_golden(
        "ni yang-mills",
        &["ni", "models/ym_ni.jv"],
        "ni_yang_mills.txt",
        0,
    );
}

#[test]
fn criterion_9_exit_codes() {
    // 0: ok
    assert_eq!(jetvar(&["trivial", "models/divergence.jv"]).status.code(), Some(0));
    // 1: nonzero residual on a verification command
    let broken = workspace_root().join("target/broken_ni.jv");
    let src = std::fs::read_to_string(workspace_root().join("models/maxwell3.jv"))
        .unwrap()
        .replace("L = -1/2*", "L = A0[;]^2 - 1/2*");
    std::fs::write(&broken, src).unwrap();
    let out = jetvar(&["ni", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "mass term must give exit 1");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: nonzero-residual"), "{text}");
    // 2: usage and parse errors
    assert_eq!(jetvar(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(jetvar(&["el", "models/no_such_file.jv"]).status.code(), Some(2));
    let bad = workspace_root().join("target/bad_model.jv");
    std::fs::write(&bad, "base = [t, x]\nfields = [y]\n\n[lagrangian]\nL = z + 1\n").unwrap();
    assert_eq!(jetvar(&["el", bad.to_str().unwrap()]).status.code(), Some(2));
    println!("ACCEPT 9 (exit codes): pass");
}

#[test]
fn criterion_9_json_determinism() {
    let a = jetvar(&["el", "models/wave.jv", "--json"]);
    let b = jetvar(&["el", "models/wave.jv", "--json"]);
    let strip = |raw: &[u8]| {
        let mut v: serde_json::Value =
            serde_json::from_slice(raw).expect("valid JSON report");
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&a.stdout), strip(&b.stdout));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["payload"]["E[y]"], "-y[;tt] + y[;xx]");
    println!("ACCEPT 9 (json determinism): pass");
}

#[test]
fn print_parse_roundtrip_through_cli_surfaces() {
    // every expression the reports emit parses back to the same normal form
    let mf = jetvar_lib_roundtrip("models/wave.jv", &["el", "models/wave.jv"]);
    assert!(mf, "wave el roundtrip");
    let mf = jetvar_lib_roundtrip("models/maxwell3.jv", &["ni", "models/maxwell3.jv"]);
    assert!(mf, "maxwell ni roundtrip");
}

fn jetvar_lib_roundtrip(model_path: &str, args: &[&str]) -> bool {
    let root = workspace_root();
    let mf = jetvar::model::load_model(&root.join(model_path)).expect("model loads");
    let out = jetvar(args);
    let stdout = String::from_utf8(out.stdout).unwrap();
    for line in stdout.lines() {
        let Some((_, rhs)) = line.split_once(" = ") else {
            continue;
        };
        if let Ok(parsed) = jetvar::parse::parse_expr(&mf.model, rhs) {
            let printed = mf.model.render(&parsed);
            let reparsed = jetvar::parse::parse_expr(&mf.model, &printed).expect("reparse");
            if parsed != reparsed {
                return false;
            }
        }
    }
    true
}
