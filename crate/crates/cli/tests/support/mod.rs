//! Helpers for driving the built binary and comparing against golden files.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary from the crate directory so relative paths in manifests
/// are the same on every machine.
pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l1logit"))
        .args(args)
        .current_dir(crate_dir())
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

pub fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// The report with its timestamp line removed, for byte comparisons.
pub fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp_unix\""))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn strip_timestamp(mut v: Value) -> Value {
    if let Some(m) = v.get_mut("manifest").and_then(Value::as_object_mut) {
        m.remove("timestamp_unix");
    }
    v
}

/// Structural equality with a relative tolerance on numbers, so goldens
/// survive last-bit differences between platforms.
pub fn json_close(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= 1e-9 * x.abs().max(y.abs()) + 1e-12 {
                Ok(())
            } else {
                Err(format!("{path}: {x} != {y}"))
            }
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                return Err(format!("{path}: length {} != {}", xs.len(), ys.len()));
            }
            xs.iter()
                .zip(ys)
                .enumerate()
                .try_for_each(|(k, (x, y))| json_close(x, y, &format!("{path}[{k}]")))
        }
        (Value::Object(xs), Value::Object(ys)) => {
            let keys_x: Vec<_> = xs.keys().collect();
            let keys_y: Vec<_> = ys.keys().collect();
            if keys_x != keys_y {
                return Err(format!("{path}: keys {keys_x:?} != {keys_y:?}"));
            }
            xs.iter()
                .try_for_each(|(k, x)| json_close(x, &ys[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} != {b}")),
    }
}

/// The golden cases: file stem and arguments.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    (
        "fit_path",
        &["fit-path", "tests/data/sample50x10.csv", "--n-lambda", "20"],
    ),
    (
        "calibrate",
        &[
            "calibrate",
            "tests/data/sample50x10.csv",
            "--n-lambda",
            "100",
            "--full-path",
        ],
    ),
    (
        "evaluate",
        &[
            "evaluate",
            "tests/data/sample50x10.csv",
            "--n-lambda",
            "20",
            "--folds",
            "5",
            "--method",
            "testing,bic",
            "--seed",
            "3",
        ],
    ),
    (
        "diagnose",
        &[
            "diagnose",
            "tests/data/sample50x10.csv",
            "--truth",
            "tests/data/sample50x10_truth.csv",
        ],
    ),
    (
        "simulate",
        &[
            "simulate",
            "--n",
            "60",
            "--p",
            "10",
            "--s",
            "2",
            "--reps",
            "2",
            "--n-lambda",
            "30",
            "--folds",
            "5",
            "--seed",
            "7",
        ],
    ),
];

fn golden_path(stem: &str) -> PathBuf {
    crate_dir()
        .join("tests/golden")
        .join(format!("{stem}.json"))
}

/// Compares one case with its golden file; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(stem: &str, args: &[&str]) -> Result<(), String> {
    let text = stdout_of(args);
    let path = golden_path(stem);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    }
    let expected = read_json(&path)?;
    let actual: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    json_close(&strip_timestamp(expected), &strip_timestamp(actual), stem)
}

pub fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
