use std::path::PathBuf;
use std::process::{Command, Output};

use msx_core::cli::{parse, render};
use msx_core::verify::traceability_markdown;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn msx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msx"))
        .args(args)
        .env_remove("MSX_SEED")
        .output()
        .expect("binary runs")
}

const GOLDEN: [&str; 3] = ["z_momentum", "lvy_frames", "suites"];

#[test]
fn golden_scripts_reproduce_byte_for_byte() {
    for name in GOLDEN {
        let script = root().join(format!("scripts/{name}.msx"));
        let expected = std::fs::read(root().join(format!("scripts/golden/{name}.json"))).unwrap();
        let a = msx(&["run", script.to_str().unwrap()]);
        let b = msx(&["run", script.to_str().unwrap()]);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{name} differs between runs");
        assert_eq!(a.stdout, expected, "{name} differs from its golden output");
    }
}

#[test]
fn golden_scripts_survive_render() {
    for name in GOLDEN {
        let src = std::fs::read_to_string(root().join(format!("scripts/{name}.msx"))).unwrap();
        let script = parse(&src).unwrap();
        assert_eq!(parse(&render(&script)).unwrap(), script, "{name}");
    }
}

#[test]
fn traceability_table_is_generated() {
    let doc = std::fs::read_to_string(root().join("docs/traceability.md")).unwrap();
    assert_eq!(doc.trim_end(), traceability_markdown().trim_end());
    let listed = msx(&["verify", "--list"]);
    assert_eq!(
        String::from_utf8(listed.stdout).unwrap().trim_end(),
        doc.trim_end()
    );
}

#[test]
fn exit_codes() {
    let ok = msx(&[
        "verify", "--suite", "thm71", "--n", "1", "--k", "1", "--trials", "2",
    ]);
    assert_eq!(ok.status.code(), Some(0));

    let mutated = msx(&[
        "--text",
        "verify",
        "--suite",
        "xhooktheta",
        "--trials",
        "2",
        "--theta-scale",
        "2",
    ]);
    assert_eq!(mutated.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mutated.stdout).starts_with("FAIL xhooktheta"));

    assert_eq!(
        msx(&["verify", "--suite", "hflvy", "--n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(msx(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(msx(&["verify", "--bogus-flag"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.msx");
    std::fs::write(&bad, "ham X = solve(g)\n").unwrap();
    let out = msx(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unbound name `g`"));

    std::fs::write(&bad, "chart Z(n=1,k=1)\nlet v = vf{x1: y1}\n").unwrap();
    let out = msx(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["ok"], false);
    assert_eq!(doc["error"]["line"], 2);

    assert_eq!(msx(&["run", "/nonexistent.msx"]).status.code(), Some(2));
}

#[test]
fn seed_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_msx"))
        .args([
            "verify", "--suite", "thm71", "--n", "1", "--k", "1", "--trials", "1",
        ])
        .env("MSX_SEED", "77")
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"][0]["report"]["params"]["seed"], 77);
}
