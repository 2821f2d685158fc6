//! Fixtures and process helpers for the CLI suites.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub const VOTE_X: &str = "1,1,1,0,0,0,1,1,1,0,0,0,0,1,0,1";

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_satexplain"))
}

pub fn vote_forest() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/vote_forest.json")
}

pub fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

/// Hidden labeling rule for the synthetic 22-feature data: roughly
/// balanced, depends on 7 features.
pub fn hidden(x: &[bool]) -> bool {
    (x[0] && x[1]) || (x[2] && !x[3]) || (x[4] && x[5] && x[6])
}

/// 200 uniform rows over 22 binary features plus a `y` column from
/// [`hidden`].
pub fn synthetic_csv(path: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 22;
    let mut out = (1..=n)
        .map(|i| format!("f{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(",y\n");
    for _ in 0..200 {
        let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut cells: Vec<&str> = x.iter().map(|&b| if b { "1" } else { "0" }).collect();
        cells.push(if hidden(&x) { "1" } else { "0" });
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).unwrap();
}

/// Sets of feature names per explanation in one section of a report.
pub fn name_sets(report: &Value, kind: &str) -> std::collections::BTreeSet<Vec<String>> {
    report[kind]["explanations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let mut v: Vec<String> = e["items"]
                .as_array()
                .unwrap()
                .iter()
                .map(|i| i["feature"].as_str().unwrap().to_string())
                .collect();
            v.sort();
            v
        })
        .collect()
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}
