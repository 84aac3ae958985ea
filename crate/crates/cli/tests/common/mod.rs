#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hmod_core::generate::{gen_instance, GenConfig};
use hmod_core::inequality::InequalityId;

pub const GOLDEN_SEED: u64 = 123;
pub const GOLDEN_DIMS: (usize, usize, usize) = (6, 2, 3);

pub fn hmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmod"))
        .args(args)
        .env_remove("HMOD_SEED")
        .output()
        .expect("hmod runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Drops the `tool_version` line so reports compare across releases.
pub fn strip_version(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"tool_version\""))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn updating() -> bool {
    std::env::var("HMOD_UPDATE_GOLDEN").is_ok_and(|v| v == "1")
}

fn compare(path: &Path, actual: &str, problems: &mut Vec<String>) {
    if updating() {
        fs::write(path, actual).expect("golden written");
        return;
    }
    match fs::read_to_string(path) {
        Ok(expected) if expected == actual => {}
        Ok(_) => problems.push(format!("{} differs", path.display())),
        Err(e) => problems.push(format!("{}: {e}", path.display())),
    }
}

/// Regenerates every golden instance, evaluates it through `hmod case` and
/// compares both files byte for byte. `HMOD_UPDATE_GOLDEN=1` rewrites them.
pub fn check_goldens() -> Vec<String> {
    let dir = golden_dir();
    let (m, d, n) = GOLDEN_DIMS;
    let mut problems = Vec::new();
    for id in InequalityId::ALL {
        let inst = gen_instance(&GenConfig::new(GOLDEN_SEED, m, d, n), id).expect("golden instance generates");
        let inst_path = dir.join(format!("{id}.instance.json"));
        compare(&inst_path, &(inst.to_json_pretty() + "\n"), &mut problems);

        let out = hmod(&["case", "--file", inst_path.to_str().unwrap()]);
        if code(&out) != 0 {
            problems.push(format!("{id}: case exited {} ({})", code(&out), stderr(&out).trim()));
            continue;
        }
        compare(
            &dir.join(format!("{id}.report.json")),
            &strip_version(&stdout(&out)),
            &mut problems,
        );
    }
    problems
}
