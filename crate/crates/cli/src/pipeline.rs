//! The four subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use satexplain_core::formula::write_dimacs;
use satexplain_core::surrogate::{
    fidelity, label, sample_neighborhood, train_forest, Precomputed, Subprocess,
};
use satexplain_core::{
    build_pmaxsat, encode_forest, encode_instance, explain_instance, explain_neighborhood, Dataset,
    DecisionTree, ExplanationKind, Instance, NeighborhoodSet, Oracle, Polarity, RandomForest,
    Sampler, ScoredReport,
};
use serde::Deserialize;

use crate::config::{
    parse_grid, sibling, HeatmapArgs, InstanceSpec, PolarityChoice, RunConfig, SamplerKind,
    ScoreArgs,
};
use crate::error::CliError;
use crate::heatmap::emit_heatmap;
use crate::output::{read_text, write_atomic};
use crate::report::{
    format_score, ExplanationReport, KindReport, NeighborhoodCache, NeighborhoodInfo,
    SurrogateInfo, Timings, SCHEMA_VERSION,
};

const FIDELITY_WARNING: f64 = 0.9;

/// Forest JSON accepted by `--forest-file`. Feature indices are 0-based.
#[derive(Debug, Deserialize)]
pub struct ForestFile {
    #[serde(default)]
    pub feature_names: Option<Vec<String>>,
    #[serde(default)]
    pub n_features: Option<usize>,
    #[serde(default)]
    pub threshold: Option<usize>,
    pub trees: Vec<DecisionTree>,
}

fn load_forest_file(
    path: &Path,
    n_hint: Option<usize>,
) -> Result<(RandomForest, Option<Vec<String>>), CliError> {
    let text = read_text(path)?;
    let ff: ForestFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: malformed forest: {e}", path.display())))?;
    if ff.trees.is_empty() {
        return Err(CliError::Config(format!(
            "{}: forest has no trees",
            path.display()
        )));
    }
    let n = ff
        .n_features
        .or(ff.feature_names.as_ref().map(Vec::len))
        .or(n_hint)
        .ok_or_else(|| {
            CliError::Config(format!(
                "{}: forest gives neither n_features nor feature_names",
                path.display()
            ))
        })?;
    if let Some(names) = &ff.feature_names {
        if names.len() != n {
            return Err(CliError::Config(format!(
                "{}: {} feature names for {n} features",
                path.display(),
                names.len()
            )));
        }
    }
    let mut rf = RandomForest::new(n, ff.trees)?;
    if let Some(t) = ff.threshold {
        rf.threshold = t;
        rf.validate()?;
    }
    Ok((rf, ff.feature_names))
}

/// Everything explain and encode share: the instance, the forest, the
/// labeled neighborhood and how the forest was obtained.
struct Prepared {
    names: Vec<String>,
    x: Instance,
    rf: RandomForest,
    ns: NeighborhoodSet,
    fidelity: Option<f64>,
    source: &'static str,
    polarity: Polarity,
    surrogate_ms: f64,
}

fn resolve_instance(cfg: &RunConfig, data: Option<&Dataset>) -> Result<Instance, CliError> {
    match &cfg.instance {
        InstanceSpec::Row(i) => {
            let d = data.expect("row selectors require --data");
            let row = d.rows.get(*i).ok_or_else(|| {
                CliError::Config(format!("--instance {i}: dataset has {} rows", d.rows.len()))
            })?;
            Ok(Instance::new(row.values.clone()))
        }
        InstanceSpec::Inline(v) => Ok(Instance::new(v.clone())),
    }
}

fn arity_check(x: &Instance, n: usize, what: &str) -> Result<(), CliError> {
    if x.len() != n {
        return Err(CliError::Config(format!(
            "instance has {} values but the {what} has {n} features",
            x.len()
        )));
    }
    Ok(())
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let start = Instant::now();
    let data = cfg
        .data
        .as_deref()
        .map(|p| {
            if !p.exists() {
                return Err(CliError::io(p, "no such file"));
            }
            Dataset::from_csv_path(p, cfg.labels_col.as_deref()).map_err(CliError::from)
        })
        .transpose()?;
    let x = resolve_instance(cfg, data.as_ref())?;
    if x.is_empty() {
        return Err(CliError::Config("instance is empty".into()));
    }
    if let Some(d) = &data {
        arity_check(&x, d.num_features(), "dataset")?;
    }

    let loaded = cfg
        .forest_file
        .as_deref()
        .map(|p| load_forest_file(p, Some(x.len())))
        .transpose()?;
    if let Some((rf, _)) = &loaded {
        arity_check(&x, rf.n_features, "forest")?;
    }
    let n = x.len();
    let names = match (&data, &loaded) {
        (Some(d), _) => d.feature_names.clone(),
        (None, Some((_, Some(names)))) => names.clone(),
        _ => satexplain_core::default_feature_names(n),
    };

    let radius = cfg.radius.unwrap_or(n);
    let sampler_kind = cfg.sampler.unwrap_or(if data.is_some() {
        SamplerKind::Dataset
    } else {
        SamplerKind::Perturb
    });
    let sampler = match sampler_kind {
        SamplerKind::Dataset => Sampler::Dataset {
            data: data.as_ref().expect("validated"),
            fallback: cfg.samples,
        },
        SamplerKind::Perturb => Sampler::Perturb {
            samples: cfg.samples,
        },
    };
    let ns = sample_neighborhood(&x, radius, sampler, cfg.seed)?;

    // Black-box labels, if any black box is available.
    let labeled = if let Some(cmd) = &cfg.oracle_cmd {
        let mut oracle = Subprocess::new(cmd.clone());
        oracle.batch_size = cfg.oracle_batch;
        Some(label(&ns, &mut oracle)?)
    } else if cfg.labels_col.is_some() {
        Some(labels_from_data(&ns, data.as_ref().expect("validated")))
    } else {
        None
    };

    let (rf, source) = match loaded {
        Some((rf, _)) => (rf, "forest-file"),
        None => {
            let ns = labeled.as_ref().ok_or_else(|| {
                CliError::Config("training a surrogate needs --oracle-cmd or --labels-col".into())
            })?;
            let rows: Vec<Instance> = ns
                .members
                .iter()
                .filter(|m| m.label.is_some())
                .cloned()
                .collect();
            if rows.is_empty() {
                return Err(CliError::Config(
                    "no labeled instance in the neighborhood".into(),
                ));
            }
            (train_forest(&rows, &cfg.forest, cfg.seed)?, "trained")
        }
    };

    let fidelity = match &labeled {
        Some(l) => {
            let known = NeighborhoodSet {
                center: l.center.clone(),
                radius: l.radius,
                members: l
                    .members
                    .iter()
                    .filter(|m| m.label.is_some())
                    .cloned()
                    .collect(),
            };
            let f = fidelity(&rf, &known)?;
            if f < FIDELITY_WARNING {
                eprintln!("warning: surrogate fidelity {f:.3} is below {FIDELITY_WARNING}");
            }
            Some(f)
        }
        None => None,
    };

    let prediction = rf.predict(&x.values)?;
    let polarity = match cfg.polarity {
        PolarityChoice::Fixed(p) => p,
        PolarityChoice::Auto => Polarity::for_prediction(prediction),
    };
    Ok(Prepared {
        names,
        x,
        rf,
        ns,
        fidelity,
        source,
        polarity,
        surrogate_ms: ms(start),
    })
}

/// Dataset labels for the members; members that are not dataset rows (the
/// center or perturbation fallback samples) stay unlabeled.
fn labels_from_data(ns: &NeighborhoodSet, data: &Dataset) -> NeighborhoodSet {
    let mut lookup = Precomputed::from_dataset(data);
    let members = ns
        .members
        .iter()
        .map(|m| {
            let mut m = m.clone();
            if m.label.is_none() {
                m.label = lookup.classify(std::slice::from_ref(&m)).ok().map(|l| l[0]);
            }
            m
        })
        .collect::<Vec<_>>();
    let mut center = ns.center.clone();
    center.label = members.first().and_then(|m| m.label);
    NeighborhoodSet {
        center,
        radius: ns.radius,
        members,
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    b.build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))
}

pub fn run_explain(cfg: &RunConfig) -> Result<ExplanationReport, CliError> {
    thread_pool(cfg.jobs)?.install(|| explain_inner(cfg))
}

fn explain_inner(cfg: &RunConfig) -> Result<ExplanationReport, CliError> {
    let start = Instant::now();
    let p = prepare(cfg)?;
    let budget = cfg.budget();

    let t = Instant::now();
    let ie = explain_instance(&p.rf, &p.x, p.polarity, &budget)?;
    let explain_ms = ms(t);

    let t = Instant::now();
    let views = if cfg.neighbor_cap > 0 {
        Some(explain_neighborhood(
            &p.rf,
            &p.ns,
            p.polarity,
            &budget,
            cfg.neighbor_cap,
        )?)
    } else {
        None
    };
    let neighborhood_ms = ms(t);

    let n = p.rf.n_features;
    let kind_report = |kind: ExplanationKind| {
        let set = ie.set(kind);
        let ne = views.as_ref().map(|(sr, cf)| match kind {
            ExplanationKind::Sr => sr,
            ExplanationKind::Cf => cf,
        });
        let scored = ScoredReport::compute(set, ne, n, cfg.aggregation);
        KindReport::build(set, &scored, &p.names)
    };
    let sr = kind_report(ExplanationKind::Sr);
    let cf = kind_report(ExplanationKind::Cf);

    let neighborhood = views.as_ref().map(|(sr_view, cf_view)| NeighborhoodInfo {
        radius: p.ns.radius,
        sampled: p.ns.len(),
        examined: sr_view.examined,
        same_prediction: sr_view.sets.len(),
        complete: sr_view.complete() && cf_view.complete(),
    });

    let report = ExplanationReport {
        schema_version: SCHEMA_VERSION,
        feature_names: p.names.clone(),
        instance: p.x.values.iter().map(|&b| u8::from(b)).collect(),
        prediction: u8::from(ie.prediction),
        polarity: p.polarity,
        fidelity: p.fidelity,
        surrogate: SurrogateInfo {
            source: p.source.to_string(),
            trees: p.rf.trees.len(),
            threshold: p.rf.threshold,
            max_depth: p
                .rf
                .trees
                .iter()
                .map(DecisionTree::depth)
                .max()
                .unwrap_or(0),
        },
        neighborhood,
        note: ie.note.clone(),
        sr,
        cf,
        config: serde_json::to_value(cfg).expect("config serializes"),
        timings: Timings {
            total_ms: ms(start),
            surrogate_ms: p.surrogate_ms,
            explain_ms,
            neighborhood_ms,
        },
    };

    let cache = NeighborhoodCache {
        schema_version: SCHEMA_VERSION,
        sr: views.as_ref().map(|v| v.0.clone()),
        cf: views.map(|v| v.1),
    };
    let report_path = cfg.report_path();
    write_atomic(&report_path, report.to_json().as_bytes())?;
    let cache_json = serde_json::to_string(&cache).expect("cache serializes");
    write_atomic(&cfg.cache_path(), cache_json.as_bytes())?;
    if let Some((w, h)) = cfg.grid {
        for kind in [ExplanationKind::Sr, ExplanationKind::Cf] {
            let scores = feature_scores(&report, kind, "fi")?;
            let path = sibling(&report_path, &format!("{}_fi.pgm", kind_tag(kind)));
            emit_heatmap(&scores, w, h, &path)?;
        }
    }
    print_summary(&report, &report_path);
    Ok(report)
}

fn kind_tag(kind: ExplanationKind) -> &'static str {
    match kind {
        ExplanationKind::Sr => "sr",
        ExplanationKind::Cf => "cf",
    }
}

fn print_summary(r: &ExplanationReport, path: &Path) {
    println!(
        "prediction {} ({} polarity), {} sufficient reasons{}, {} counterfactuals{}",
        r.prediction,
        r.polarity,
        r.sr.count,
        if r.sr.complete { "" } else { " (incomplete)" },
        r.cf.count,
        if r.cf.complete { "" } else { " (incomplete)" },
    );
    if let Some(f) = r.fidelity {
        println!("surrogate fidelity {f:.3}");
    }
    if let Some(note) = &r.note {
        println!("note: {note}");
    }
    for (tag, k) in [("SR", &r.sr), ("CF", &r.cf)] {
        let top: Vec<&str> = k.rankings["fi"]
            .iter()
            .take(5)
            .map(String::as_str)
            .collect();
        if !top.is_empty() {
            println!("top {tag} features by involvement: {}", top.join(", "));
        }
    }
    println!("report written to {}", path.display());
}

/// One score per feature, 0 where undefined or uninvolved.
fn feature_scores(
    r: &ExplanationReport,
    kind: ExplanationKind,
    key: &str,
) -> Result<Vec<f64>, CliError> {
    if !["fi", "fg", "fr"].contains(&key) {
        return Err(CliError::Config(format!(
            "unknown feature score `{key}` (fi, fg, fr)"
        )));
    }
    let mut out = vec![0.0; r.feature_names.len()];
    for f in &r.kind(kind).features {
        let v = match key {
            "fi" => &f.fi,
            "fg" => &f.fg,
            _ => &f.fr,
        };
        out[f.index] = v.as_ref().map_or(0.0, |s| s.value);
    }
    Ok(out)
}

/// Writes `forest.cnf`, `instance.wcnf` and `varmap.json` into the output
/// directory.
pub fn run_encode(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    thread_pool(cfg.jobs)?.install(|| {
        let p = prepare(cfg)?;
        let model = encode_forest(&p.rf, p.polarity, &p.names)?;
        let soft = encode_instance(&p.x, &model.var_map)?;
        let pm = build_pmaxsat(&model, soft)?;
        let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let varmap =
            serde_json::to_string_pretty(&model.var_map_file()).expect("var map serializes") + "\n";
        let files = [
            ("forest.cnf", write_dimacs(&model.cnf)),
            ("instance.wcnf", pm.to_wcnf()),
            ("varmap.json", varmap),
        ];
        let mut written = Vec::new();
        for (name, text) in files {
            let path = dir.join(name);
            write_atomic(&path, text.as_bytes())?;
            written.push(path);
        }
        println!(
            "{} variables, {} hard clauses, {} soft clauses written to {}",
            model.cnf.num_vars(),
            pm.hard().len(),
            pm.soft().len(),
            dir.display()
        );
        Ok(written)
    })
}

/// Recomputes the score tables of a report from its stored explanations
/// and the neighborhood cache, and writes `scores_sr.csv`/`scores_cf.csv`.
pub fn run_score(args: &ScoreArgs) -> Result<Vec<PathBuf>, CliError> {
    let report = ExplanationReport::from_json(&read_text(&args.report)?)?;
    let cache_path = args
        .cache
        .clone()
        .unwrap_or_else(|| sibling(&args.report, "neighborhood.json"));
    let cache: NeighborhoodCache = serde_json::from_str(&read_text(&cache_path)?)
        .map_err(|e| CliError::Config(format!("{}: malformed cache: {e}", cache_path.display())))?;
    if cache.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "{}: cache schema version {} is not supported",
            cache_path.display(),
            cache.schema_version
        )));
    }
    let dir = match &args.out {
        Some(d) => d.clone(),
        None => args
            .report
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let x = report.instance();
    let mut written = Vec::new();
    for kind in [ExplanationKind::Sr, ExplanationKind::Cf] {
        let set = report.kind(kind).to_set(&x, kind);
        let scored = ScoredReport::compute(
            &set,
            cache.get(kind),
            report.feature_names.len(),
            args.aggregation.into(),
        );
        let path = dir.join(format!("scores_{}.csv", kind_tag(kind)));
        write_atomic(&path, &scores_csv(&scored, &report.feature_names)?)?;
        written.push(path);
    }
    Ok(written)
}

/// `feature_name,FI,FG,FR` with exact fractions; empty cells are
/// undefined scores.
pub fn scores_csv(scored: &ScoredReport, names: &[String]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(["feature_name", "FI", "FG", "FR"])
        .map_err(csv_err)?;
    for f in &scored.features {
        let cell = |s: Option<satexplain_core::Score>| s.map(format_score).unwrap_or_default();
        w.write_record([
            names[f.feature].clone(),
            format_score(f.fi),
            cell(f.fg),
            cell(f.fr),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Config(format!("csv: {e}")))
}

pub fn run_heatmap(args: &HeatmapArgs) -> Result<(), CliError> {
    let report = ExplanationReport::from_json(&read_text(&args.report)?)?;
    let (w, h) = parse_grid(&args.grid)?;
    let scores = feature_scores(&report, args.kind.into(), &args.score.to_lowercase())?;
    emit_heatmap(&scores, w, h, &args.out)
}
