//! JSON report and neighborhood cache formats.

use std::collections::BTreeMap;

use satexplain_core::scoring::{ScoredExplanation, EXPLANATION_KEYS, FEATURE_KEYS};
use satexplain_core::{
    Explanation, ExplanationKind, ExplanationSet, Instance, NeighborhoodExplanations, Polarity,
    Score, ScoredReport, SoftOrigin,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A score as a float for reading and as an exact fraction for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreValue {
    pub value: f64,
    pub exact: String,
}

impl ScoreValue {
    pub fn new(s: Score) -> ScoreValue {
        ScoreValue {
            value: *s.numer() as f64 / *s.denom() as f64,
            exact: format_score(s),
        }
    }
}

pub fn format_score(s: Score) -> String {
    if *s.denom() == 1 {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn parse_score(text: &str) -> Option<Score> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse().ok()?, d.trim().parse().ok()?),
        None => (text.trim().parse().ok()?, 1),
    };
    (d != 0).then(|| Score::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportItem {
    pub feature: String,
    pub index: usize,
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportExplanation {
    pub items: Vec<ReportItem>,
    pub size: usize,
    pub scores: BTreeMap<String, Option<ScoreValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFeature {
    pub feature: String,
    pub index: usize,
    pub fi: Option<ScoreValue>,
    pub fg: Option<ScoreValue>,
    pub fr: Option<ScoreValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindReport {
    pub complete: bool,
    pub count: usize,
    pub explanations: Vec<ReportExplanation>,
    /// Only features involved in at least one explanation.
    pub features: Vec<ReportFeature>,
    /// Explanation positions per explanation score and feature names per
    /// feature score, best first.
    pub rankings: BTreeMap<String, Vec<String>>,
}

impl KindReport {
    pub fn build(set: &ExplanationSet, scored: &ScoredReport, names: &[String]) -> KindReport {
        let explanations = scored
            .explanations
            .iter()
            .map(|s| report_explanation(s, names))
            .collect();
        let features = scored
            .features
            .iter()
            .filter(|f| f.fi > Score::new(0, 1))
            .map(|f| ReportFeature {
                feature: names[f.feature].clone(),
                index: f.feature,
                fi: Some(ScoreValue::new(f.fi)),
                fg: f.fg.map(ScoreValue::new),
                fr: f.fr.map(ScoreValue::new),
            })
            .collect();
        let mut rankings = BTreeMap::new();
        for key in EXPLANATION_KEYS {
            let order = scored.rank_explanations(key, true).expect("known key");
            rankings.insert(
                key.to_string(),
                order.iter().map(|i| i.to_string()).collect(),
            );
        }
        for key in FEATURE_KEYS {
            let order = scored.rank_features(key, true).expect("known key");
            let involved: Vec<String> = order
                .into_iter()
                .filter(|&k| set.cover(k).next().is_some())
                .map(|k| names[k].clone())
                .collect();
            rankings.insert(key.to_string(), involved);
        }
        KindReport {
            complete: set.complete,
            count: set.len(),
            explanations,
            features,
            rankings,
        }
    }

    /// The explanation set this section describes.
    pub fn to_set(&self, instance: &Instance, kind: ExplanationKind) -> ExplanationSet {
        let explanations = self
            .explanations
            .iter()
            .map(|e| {
                Explanation::new(
                    kind,
                    e.items
                        .iter()
                        .map(|i| SoftOrigin {
                            feature: i.index,
                            value: i.value == 1,
                        })
                        .collect(),
                )
            })
            .collect();
        ExplanationSet::new(instance.clone(), kind, explanations, self.complete)
    }
}

fn report_explanation(s: &ScoredExplanation, names: &[String]) -> ReportExplanation {
    let items = s
        .explanation
        .items
        .iter()
        .map(|o| ReportItem {
            feature: names[o.feature].clone(),
            index: o.feature,
            value: u8::from(o.value),
        })
        .collect();
    let scores = EXPLANATION_KEYS
        .iter()
        .map(|&k| {
            (
                k.to_string(),
                s.get(k).expect("known key").map(ScoreValue::new),
            )
        })
        .collect();
    ReportExplanation {
        items,
        size: s.explanation.size(),
        scores,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurrogateInfo {
    /// `forest-file` or `trained`.
    pub source: String,
    pub trees: usize,
    pub threshold: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodInfo {
    pub radius: usize,
    pub sampled: usize,
    pub examined: usize,
    pub same_prediction: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub surrogate_ms: f64,
    pub explain_ms: f64,
    pub neighborhood_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub instance: Vec<u8>,
    pub prediction: u8,
    pub polarity: Polarity,
    /// Agreement of the surrogate with the black box on the neighborhood;
    /// absent when no black box was consulted.
    pub fidelity: Option<f64>,
    pub surrogate: SurrogateInfo,
    pub neighborhood: Option<NeighborhoodInfo>,
    pub note: Option<String>,
    pub sr: KindReport,
    pub cf: KindReport,
    pub config: serde_json::Value,
    pub timings: Timings,
}

impl ExplanationReport {
    pub fn instance(&self) -> Instance {
        Instance::new(self.instance.iter().map(|&b| b == 1).collect())
    }

    pub fn kind(&self, kind: ExplanationKind) -> &KindReport {
        match kind {
            ExplanationKind::Sr => &self.sr,
            ExplanationKind::Cf => &self.cf,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ExplanationReport, CliError> {
        let r: ExplanationReport = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("malformed report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "report schema version {} is not supported",
                r.schema_version
            )));
        }
        Ok(r)
    }
}

/// Per-neighbor explanation sets saved by explain for later rescoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodCache {
    pub schema_version: u32,
    pub sr: Option<NeighborhoodExplanations>,
    pub cf: Option<NeighborhoodExplanations>,
}

impl NeighborhoodCache {
    pub fn get(&self, kind: ExplanationKind) -> Option<&NeighborhoodExplanations> {
        match kind {
            ExplanationKind::Sr => self.sr.as_ref(),
            ExplanationKind::Cf => self.cf.as_ref(),
        }
    }
}
