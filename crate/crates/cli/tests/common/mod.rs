#![allow(dead_code)]

use std::process::{Command, Output};

pub fn nilaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilaw"))
        .args(args)
        .env_remove("NILAW_BUDGET")
        .output()
        .expect("nilaw binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Runs `nilaw`, expects success and returns the parsed report.
pub fn report(args: &[&str]) -> serde_json::Value {
    let out = nilaw(args);
    assert!(out.status.success(), "nilaw {args:?} failed: {}", stderr(&out));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}
