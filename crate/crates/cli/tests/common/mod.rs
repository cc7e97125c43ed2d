#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn transcript(&self) -> String {
        format!(
            "exit: {}\n--- stdout\n{}--- stderr\n{}",
            self.code, self.stdout, self.stderr
        )
    }
}

/// Runs the binary from the crate directory so that relative fixture paths
/// in the output are stable.
pub fn jetcalc(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_jetcalc"))
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

/// Golden cases: name, arguments, expected exit code.
pub const GOLDEN: &[(&str, &[&str], i32)] = &[
    (
        "bracket_text",
        &[
            "bracket",
            "--session",
            "fixtures/intro.jet",
            "--left",
            "F",
            "--right",
            "G",
        ],
        0,
    ),
    (
        "bracket_json",
        &[
            "bracket",
            "--session",
            "fixtures/intro.jet",
            "--left",
            "F",
            "--right",
            "G",
            "--format",
            "json",
        ],
        0,
    ),
    (
        "linearize_latex",
        &[
            "linearize",
            "--session",
            "fixtures/intro.jet",
            "--op",
            "F",
            "--format",
            "latex",
        ],
        0,
    ),
    (
        "anomaly_text",
        &[
            "anomaly",
            "--session",
            "fixtures/intro.jet",
            "--left",
            "F",
            "--right",
            "G",
        ],
        0,
    ),
    (
        "hessian_text",
        &[
            "hessian",
            "--session",
            "fixtures/intro.jet",
            "--op",
            "F",
            "--arg",
            "G",
            "--third",
            "H",
        ],
        0,
    ),
    ("section4_text", &["section4"], 0),
    ("section4_latex", &["section4", "--format", "latex"], 0),
    (
        "verify_prop2_random",
        &["verify", "prop2", "--random", "5", "--seed", "7"],
        0,
    ),
    (
        "verify_prop3_explicit",
        &[
            "verify",
            "prop3",
            "--session",
            "fixtures/intro.jet",
            "--ops",
            "F,G,H",
        ],
        0,
    ),
    (
        "symmetry_holds",
        &[
            "check-symmetry",
            "--session",
            "fixtures/symmetry.jet",
            "--f",
            "F",
            "--h",
            "H",
            "--theta",
            "Theta",
        ],
        0,
    ),
    (
        "symmetry_fails",
        &[
            "check-symmetry",
            "--session",
            "fixtures/symmetry.jet",
            "--f",
            "F",
            "--h",
            "H",
        ],
        1,
    ),
    (
        "aux_holds",
        &[
            "check-aux",
            "--session",
            "fixtures/symmetry.jet",
            "--f",
            "K",
            "--g",
            "S",
            "--lambda",
            "L",
            "--mu",
            "M",
        ],
        0,
    ),
    (
        "aux_fails",
        &[
            "check-aux",
            "--session",
            "fixtures/symmetry.jet",
            "--f",
            "K",
            "--g",
            "S",
        ],
        1,
    ),
    (
        "fixtures_all",
        &["check-fixtures", "--fixtures", "fixtures/claims.json"],
        0,
    ),
    (
        "print_long_names",
        &["print", "--session", "fixtures/long_names.jet"],
        0,
    ),
    (
        "parse_unbalanced",
        &["print", "--session", "tests/data/unbalanced.jet"],
        2,
    ),
    (
        "parse_undeclared",
        &["print", "--session", "tests/data/undeclared.jet"],
        2,
    ),
    (
        "parse_duplicate",
        &["print", "--session", "tests/data/duplicate.jet"],
        2,
    ),
    (
        "parse_lexical",
        &["print", "--session", "tests/data/lexical.jet"],
        2,
    ),
    (
        "unknown_operator",
        &[
            "bracket",
            "--session",
            "fixtures/intro.jet",
            "--left",
            "F",
            "--right",
            "Q",
        ],
        2,
    ),
    (
        "bracket_with_zero",
        &[
            "bracket",
            "--session",
            "fixtures/section4.jet",
            "--left",
            "F",
            "--right",
            "Z",
        ],
        0,
    ),
    (
        "rank_mismatch",
        &[
            "bracket",
            "--session",
            "fixtures/section4.jet",
            "--left",
            "F",
            "--right",
            "W",
        ],
        2,
    ),
    ("missing_session", &["linearize", "--op", "F"], 2),
    ("unknown_identity", &["verify", "nope"], 2),
    (
        "missing_file",
        &["print", "--session", "tests/data/absent.jet"],
        2,
    ),
];

pub fn golden_path(name: &str) -> PathBuf {
    crate_dir().join("tests/golden").join(format!("{name}.txt"))
}

/// Compares every golden case; with `UPDATE_GOLDEN` set, rewrites the files.
/// Returns a description of each mismatch.
pub fn check_golden() -> Vec<String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut problems = Vec::new();
    for (name, args, code) in GOLDEN {
        let run = jetcalc(args);
        if run.code != *code {
            problems.push(format!("{name}: exit {} instead of {code}", run.code));
        }
        let path = golden_path(name);
        let text = run.transcript();
        if update {
            std::fs::write(&path, &text).expect("golden file is writable");
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == text => {}
            Ok(_) => problems.push(format!("{name}: output differs from {}", path.display())),
            Err(_) => problems.push(format!("{name}: missing {}", path.display())),
        }
    }
    problems
}

pub fn session_fixtures() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(crate_dir().join("fixtures"))
        .expect("fixtures directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "jet"))
        .collect();
    paths.sort();
    paths
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("readable fixture")
}
