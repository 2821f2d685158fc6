mod support;

use std::path::Path;

use satexplain_cli::pipeline::scores_csv;
use satexplain_cli::report::{parse_score, ExplanationReport, NeighborhoodCache};
use satexplain_core::formula::read_dimacs;
use satexplain_core::{solve, ExplanationKind, PartialMaxSatInstance, Score, ScoredReport};

use support::*;

fn explain_vote(dir: &Path, extra: &[&str]) -> std::process::Output {
    let forest = vote_forest();
    let mut args = vec![
        "explain",
        "--forest-file",
        forest.to_str().unwrap(),
        "--instance",
        VOTE_X,
    ];
    args.extend_from_slice(extra);
    run(&args, dir)
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn opposite_prediction_writes_empty_lists_with_note() {
    let dir = tempfile::tempdir().unwrap();
    // The vote instance is predicted 0, so the positive polarity has nothing to explain.
    let out = explain_vote(dir.path(), &["--polarity", "pos", "--out", "r.json"]);
    assert_eq!(code(&out), 0);
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(
        r["note"],
        "instance already predicted negative; zero explanations of kind SR/CF"
    );
    assert_eq!(r["sr"]["count"], 0);
    assert_eq!(r["cf"]["count"], 0);
}

#[test]
fn positive_predictions_are_explained_under_auto_polarity() {
    let dir = tempfile::tempdir().unwrap();
    // Flipping X4 and X5 to 1 makes two trees vote 1.
    let x = "1,1,1,1,1,0,1,1,1,0,0,0,0,1,0,1";
    let forest = vote_forest();
    let out = run(
        &[
            "explain",
            "--forest-file",
            forest.to_str().unwrap(),
            "--instance",
            x,
            "--polarity",
            "auto",
            "--out",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["prediction"], 1);
    assert_eq!(r["polarity"], "positive");
    assert!(r["sr"]["count"].as_u64().unwrap() > 0);
    assert!(r["note"].is_null());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Config: bad flags, arity mismatch, empty forest, malformed CSV.
    assert_eq!(code(&run(&["explain", "--bogus"], d)), 1);
    assert_eq!(code(&run(&["explain", "--instance", "1,0"], d)), 1);
    let forest = vote_forest();
    let f = forest.to_str().unwrap();
    assert_eq!(
        code(&run(
            &["explain", "--forest-file", f, "--instance", "1,0"],
            d
        )),
        1
    );
    write(d, "empty.json", r#"{"n_features": 2, "trees": []}"#);
    assert_eq!(
        code(&run(
            &["encode", "--forest-file", "empty.json", "--instance", "1,0"],
            d
        )),
        1
    );
    write(d, "bad.csv", "a,b\n0,2\n");
    let out = run(
        &[
            "explain",
            "--data",
            "bad.csv",
            "--instance",
            "0",
            "--oracle-cmd",
            "cat",
        ],
        d,
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
    // I/O: missing inputs and artifacts.
    assert_eq!(
        code(&run(
            &[
                "explain",
                "--forest-file",
                "missing.json",
                "--instance",
                "1,0"
            ],
            d
        )),
        2
    );
    assert_eq!(
        code(&run(
            &[
                "explain",
                "--data",
                "missing.csv",
                "--labels-col",
                "y",
                "--instance",
                "0"
            ],
            d
        )),
        2
    );
    assert_eq!(code(&run(&["score", "--report", "missing.json"], d)), 2);
    // Oracle: the command fails, or answers with something other than 0/1.
    let oracle_args = |cmd: &'static str| {
        vec![
            "explain",
            "--instance",
            "1,0,1,1",
            "--oracle-cmd",
            cmd,
            "--out",
            "o.json",
        ]
    };
    assert_eq!(code(&run(&oracle_args("exit 3"), d)), 3);
    assert_eq!(code(&run(&oracle_args("cat"), d)), 3);
    assert!(!d.join("o.json").exists());
    // Solver: a forest that always predicts 1 cannot be made to predict 0.
    write(
        d,
        "const.json",
        r#"{"n_features": 2, "trees": [{"leaf": 1}]}"#,
    );
    let out = run(
        &[
            "explain",
            "--forest-file",
            "const.json",
            "--instance",
            "1,0",
            "--polarity",
            "pos",
            "--out",
            "c.json",
        ],
        d,
    );
    assert_eq!(code(&out), 4);
    assert!(!d.join("c.json").exists());
}

#[test]
fn encode_writes_reloadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let forest = vote_forest();
    let out = run(
        &[
            "encode",
            "--forest-file",
            forest.to_str().unwrap(),
            "--instance",
            VOTE_X,
            "--out",
            "enc",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let enc = dir.path().join("enc");
    let wcnf = std::fs::read_to_string(enc.join("instance.wcnf")).unwrap();
    let p = PartialMaxSatInstance::from_wcnf(&wcnf).unwrap();
    assert_eq!(p.soft().len(), 16);
    // Hard part alone is satisfiable; with every soft unit it is not, since
    // the instance is predicted 0 and the negative polarity asserts 1.
    let cnf = read_dimacs(&std::fs::read_to_string(enc.join("forest.cnf")).unwrap()).unwrap();
    assert!(solve(&cnf, &[]).unwrap().is_sat());
    assert!(!solve(&cnf, p.soft()).unwrap().is_sat());
    assert_eq!(p.hard().len(), cnf.len());
    let map = read_json(&enc.join("varmap.json"));
    assert_eq!(map["feature_vars"].as_array().unwrap().len(), 16);
    assert_eq!(map["forest_output"], 20);
    assert_eq!(map["polarity"], "negative");
}

#[test]
fn score_tables_match_the_report() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&explain_vote(dir.path(), &["--out", "r.json"])), 0);
    let out = run(
        &["score", "--report", "r.json", "--out", "tables"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let report =
        ExplanationReport::from_json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap())
            .unwrap();
    let cache: NeighborhoodCache = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("r.neighborhood.json")).unwrap(),
    )
    .unwrap();
    for (kind, file) in [
        (ExplanationKind::Sr, "scores_sr.csv"),
        (ExplanationKind::Cf, "scores_cf.csv"),
    ] {
        let set = report.kind(kind).to_set(&report.instance(), kind);
        let scored = ScoredReport::compute(&set, cache.get(kind), 16, Default::default());
        let text = std::fs::read(dir.path().join("tables").join(file)).unwrap();
        assert_eq!(text, scores_csv(&scored, &report.feature_names).unwrap());

        let mut rd = csv::Reader::from_reader(text.as_slice());
        assert_eq!(
            rd.headers().unwrap(),
            vec!["feature_name", "FI", "FG", "FR"]
        );
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 16);
        for (row, f) in rows.iter().zip(&scored.features) {
            assert_eq!(&row[0], report.feature_names[f.feature]);
            assert_eq!(parse_score(&row[1]), Some(f.fi));
            assert_eq!(parse_score(&row[2]), f.fg);
            assert_eq!(parse_score(&row[3]), f.fr);
        }
        if kind == ExplanationKind::Cf {
            let x5 = rows.iter().find(|r| &r[0] == "X5").unwrap();
            assert_eq!(parse_score(&x5[1]), Some(Score::new(3, 4)));
        }
    }
}

#[test]
fn without_neighborhood_only_local_scores_are_filled() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&explain_vote(
            dir.path(),
            &["--neighbor-cap", "0", "--out", "r.json"]
        )),
        0
    );
    let r = read_json(&dir.path().join("r.json"));
    assert!(r["neighborhood"].is_null());
    for e in r["cf"]["explanations"].as_array().unwrap() {
        assert!(e["scores"]["gen"].is_null());
        assert!(e["scores"]["resp_n"].is_null());
        assert!(!e["scores"]["par"].is_null());
    }
    assert_eq!(code(&run(&["score", "--report", "r.json"], dir.path())), 0);
    let text = std::fs::read_to_string(dir.path().join("scores_cf.csv")).unwrap();
    assert!(text.lines().any(|l| l == "X5,3/4,,1/2"), "{text}");
}

#[test]
fn heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&explain_vote(
            dir.path(),
            &["--out", "r.json", "--grid", "4x4"]
        )),
        0
    );
    for name in ["r.sr_fi.pgm", "r.cf_fi.pgm"] {
        let b = std::fs::read(dir.path().join(name)).unwrap();
        assert!(b.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(b.len(), "P5\n4 4\n255\n".len() + 16);
    }
    let out = run(
        &[
            "heatmap", "--report", "r.json", "--grid", "4x4", "--kind", "cf", "--out", "h.pgm",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let b = std::fs::read(dir.path().join("h.pgm")).unwrap();
    let px = &b[b.len() - 16..];
    // FI over the CFs: X5 3/4 is brightest, X4 and X12 1/2, X9 1/4.
    assert_eq!(px[4], 255);
    assert_eq!(px[3], 170);
    assert_eq!(px[11], 170);
    assert_eq!(px[8], 85);
    assert_eq!(px.iter().filter(|&&p| p > 0).count(), 4);
    let out = run(
        &[
            "heatmap", "--report", "r.json", "--grid", "5x3", "--out", "bad.pgm",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("bad.pgm").exists());
}

#[test]
fn oracle_command_drives_training() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = r#"awk -F, '{ print (($1 && $2) || ($3 && !$4)) ? 1 : 0 }'"#;
    let out = run(
        &[
            "explain",
            "--oracle-cmd",
            cmd,
            "--instance",
            "1,1,0,0,1,0,1,0",
            "--samples",
            "150",
            "--oracle-batch",
            "16",
            "--out",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["surrogate"]["source"], "trained");
    assert_eq!(r["prediction"], 1);
    assert!(r["fidelity"].as_f64().unwrap() >= 0.9);
    assert_eq!(r["feature_names"][0], "X1");
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    synthetic_csv(&dir.path().join("d.csv"), 5);
    let mut reports = Vec::new();
    for (i, jobs) in ["1", "3"].iter().enumerate() {
        let name = format!("r{i}.json");
        let out = run(
            &[
                "explain",
                "--data",
                "d.csv",
                "--labels-col",
                "y",
                "--instance",
                "3",
                "--radius",
                "12",
                "--seed",
                "9",
                "--jobs",
                jobs,
                "--out",
                &name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(without_timings(read_json(&dir.path().join(&name))));
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0]["feature_names"][0], "f1");
}
