//! Runs the quick examples end to end (`cargo test` builds all of them).

use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> String {
    let exe = std::env::current_exe().unwrap();
    let dir: PathBuf = exe.parent().unwrap().parent().unwrap().join("examples");
    let path = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
    assert!(path.exists(), "{} not built", path.display());
    let out = Command::new(&path).output().unwrap();
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn bounds_table_runs() {
    assert!(example("bounds_table").lines().count() > 5);
}

#[test]
fn basis_pursuit_runs() {
    assert!(!example("basis_pursuit").is_empty());
}

#[test]
fn lq_stability_runs() {
    assert!(!example("lq_stability").is_empty());
}
