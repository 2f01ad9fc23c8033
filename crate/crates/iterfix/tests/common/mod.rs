//! Shared helpers for the integration and acceptance test suites.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Output;

use iterfix::cli::{load_corpus, load_model};
use iterfix::exec::TestSuite;
use iterfix::gen::GeneratorModel;
use iterfix::lang::SourceProgram;
use iterfix::perturb::CorpusSample;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_iterfix")
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(rel: &str) -> PathBuf {
    crate_dir().join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    let p = fixture(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("cannot read {}: {e}", p.display()))
}

/// Runs the CLI binary with the given working directory and args.
pub fn run_cli(cwd: &Path, args: &[&str]) -> Output {
    std::process::Command::new(bin())
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("failed to spawn iterfix binary")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

pub fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Recursively copies a directory tree.
pub fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let dst = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &dst);
        } else {
            std::fs::copy(entry.path(), &dst).unwrap();
        }
    }
}

/// Copies the seed programs and fixed bugs into a fresh workspace root so CLI
/// runs can use the exact relative paths the shipped artifacts were built with.
pub fn stage_workspace(root: &Path) {
    copy_dir(&fixture("fixtures/programs"), &root.join("fixtures/programs"));
    copy_dir(&fixture("fixtures/bugs"), &root.join("fixtures/bugs"));
    std::fs::create_dir_all(root.join("fixtures/golden/traces")).unwrap();
}

pub fn shipped_corpus() -> Vec<CorpusSample> {
    load_corpus(&read_fixture("fixtures/golden/corpus.jsonl")).expect("shipped corpus parses")
}

pub fn shipped_two_location_corpus() -> Vec<CorpusSample> {
    load_corpus(&read_fixture("fixtures/golden/corpus2.jsonl")).expect("shipped corpus2 parses")
}

pub fn shipped_model() -> GeneratorModel {
    load_model(&read_fixture("fixtures/golden/model.json")).expect("shipped model parses")
}

/// Loads every seed program with its test suite, sorted by name.
pub fn seed_programs() -> Vec<(String, SourceProgram, TestSuite)> {
    let dir = fixture("fixtures/programs");
    let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mini"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|p| {
            let stem = p.file_stem().unwrap().to_string_lossy().to_string();
            let src = std::fs::read_to_string(&p).unwrap();
            let suite_text =
                std::fs::read_to_string(p.with_file_name(format!("{stem}.tests.json"))).unwrap();
            (
                stem,
                SourceProgram::from_file_text(&src),
                TestSuite::from_json(&suite_text).unwrap(),
            )
        })
        .collect()
}
