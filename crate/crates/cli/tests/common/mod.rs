#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn qfc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qfc"))
}

pub fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn run(command: &str, config: &Path, extra: &[&str]) -> Output {
    qfc().arg(command).arg("--config").arg(config).args(extra).output().expect("spawn qfc")
}

/// Runs and returns stdout, panicking with stderr on failure.
pub fn run_ok(command: &str, config: &Path, extra: &[&str]) -> String {
    let out = run(command, config, extra);
    assert!(out.status.success(), "qfc {command} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

pub fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON output")
}

pub fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}
