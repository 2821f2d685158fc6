//! Relevance scores for explanations and features.
//!
//! All scores are exact rationals. A score that is undefined for its input
//! (for instance the responsibility of a feature no explanation mentions) is
//! `None`, never zero.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::data::Instance;
use crate::encoder::SoftOrigin;
use crate::sat::SoftSubset;

pub type Score = Ratio<u64>;

pub fn score_to_f64(s: Score) -> f64 {
    *s.numer() as f64 / *s.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("unknown score `{0}`")]
    UnknownKey(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExplanationKind {
    /// Sufficient reason: a minimal part of the instance that forces the
    /// prediction.
    Sr,
    /// Counterfactual: a minimal set of features whose flip changes it.
    Cf,
}

impl fmt::Display for ExplanationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExplanationKind::Sr => "SR",
            ExplanationKind::Cf => "CF",
        })
    }
}

/// A set of (feature, value-in-x) items, sorted by feature. Two
/// explanations are the same if they have the same kind and items,
/// whichever instance produced them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Explanation {
    pub kind: ExplanationKind,
    pub items: Vec<SoftOrigin>,
}

impl Explanation {
    pub fn new(kind: ExplanationKind, mut items: Vec<SoftOrigin>) -> Explanation {
        items.sort();
        items.dedup();
        Explanation { kind, items }
    }

    pub fn from_subset(
        kind: ExplanationKind,
        s: &SoftSubset,
        origins: &[SoftOrigin],
    ) -> Explanation {
        Explanation::new(kind, s.indices().iter().map(|&i| origins[i]).collect())
    }

    pub fn size(&self) -> usize {
        self.items.len()
    }

    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().map(|o| o.feature)
    }

    pub fn involves(&self, feature: usize) -> bool {
        self.items.iter().any(|o| o.feature == feature)
    }

    fn canonical_cmp(&self, other: &Explanation) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.features().cmp(other.features()))
    }
}

/// The explanations of one kind for one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationSet {
    pub instance: Instance,
    pub kind: ExplanationKind,
    pub explanations: Vec<Explanation>,
    /// False when enumeration stopped early.
    pub complete: bool,
}

impl ExplanationSet {
    /// Deduplicates and orders by size, then by feature indices.
    pub fn new(
        instance: Instance,
        kind: ExplanationKind,
        explanations: Vec<Explanation>,
        complete: bool,
    ) -> ExplanationSet {
        let mut seen = HashSet::new();
        let mut explanations: Vec<Explanation> = explanations
            .into_iter()
            .filter(|e| seen.insert(e.clone()))
            .collect();
        explanations.sort_by(Explanation::canonical_cmp);
        ExplanationSet {
            instance,
            kind,
            explanations,
            complete,
        }
    }

    pub fn len(&self) -> usize {
        self.explanations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.explanations.is_empty()
    }

    pub fn contains(&self, e: &Explanation) -> bool {
        self.explanations.contains(e)
    }

    /// Explanations involving `feature`.
    pub fn cover(&self, feature: usize) -> impl Iterator<Item = &Explanation> {
        self.explanations
            .iter()
            .filter(move |e| e.involves(feature))
    }
}

/// Explanation sets of the examined neighbors that share the center's
/// prediction, center first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodExplanations {
    pub radius: usize,
    pub kind: ExplanationKind,
    /// Members of the sampled neighborhood.
    pub sampled: usize,
    /// Members examined (nearest first, up to the cap), center included.
    /// This is the denominator of the generality score.
    pub examined: usize,
    pub sets: Vec<ExplanationSet>,
}

impl NeighborhoodExplanations {
    pub fn complete(&self) -> bool {
        self.sets.iter().all(|s| s.complete)
    }

    fn union(&self) -> Vec<&Explanation> {
        let mut seen = HashSet::new();
        self.sets
            .iter()
            .flat_map(|s| &s.explanations)
            .filter(|e| seen.insert(*e))
            .collect()
    }
}

/// Inverse size.
pub fn score_parsimony(e: &Explanation) -> Score {
    Ratio::new(1, e.size().max(1) as u64)
}

/// Share of examined neighbors with the same prediction whose explanation
/// set contains `e`.
pub fn score_generality(e: &Explanation, ne: &NeighborhoodExplanations) -> Option<Score> {
    if ne.examined == 0 {
        return None;
    }
    let extent = ne.sets.iter().filter(|s| s.contains(e)).count() as u64;
    Some(Ratio::new(extent, ne.examined as u64))
}

/// Inverse number of explanations of the instance.
pub fn score_responsibility(set: &ExplanationSet) -> Option<Score> {
    (!set.is_empty()).then(|| Ratio::new(1, set.len() as u64))
}

/// Highest responsibility `e` has at any examined neighbor.
pub fn score_responsibility_neighborhood(
    e: &Explanation,
    ne: &NeighborhoodExplanations,
) -> Option<Score> {
    ne.sets
        .iter()
        .filter(|s| s.contains(e))
        .map(|s| Ratio::new(1, s.len() as u64))
        .max()
}

/// Share of the instance's explanations involving the feature.
pub fn score_feature_involvement(feature: usize, set: &ExplanationSet) -> Option<Score> {
    if set.is_empty() {
        return None;
    }
    Some(Ratio::new(
        set.cover(feature).count() as u64,
        set.len() as u64,
    ))
}

/// Share of the distinct explanations across the neighborhood that involve
/// the feature.
pub fn score_feature_generality(feature: usize, ne: &NeighborhoodExplanations) -> Option<Score> {
    let all = ne.union();
    if all.is_empty() {
        return None;
    }
    let cover = all.iter().filter(|e| e.involves(feature)).count() as u64;
    Some(Ratio::new(cover, all.len() as u64))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Min,
    Max,
    #[default]
    Avg,
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(Aggregation::Min),
            "max" => Ok(Aggregation::Max),
            "avg" => Ok(Aggregation::Avg),
            o => Err(format!("unknown aggregation `{o}`")),
        }
    }
}

/// Inverse of the aggregated size of the explanations involving the
/// feature; `None` when none do.
pub fn score_feature_responsibility(
    feature: usize,
    set: &ExplanationSet,
    aggr: Aggregation,
) -> Option<Score> {
    let sizes: Vec<u64> = set.cover(feature).map(|e| e.size() as u64).collect();
    if sizes.is_empty() {
        return None;
    }
    Some(match aggr {
        Aggregation::Min => Ratio::new(1, *sizes.iter().min().unwrap()),
        Aggregation::Max => Ratio::new(1, *sizes.iter().max().unwrap()),
        Aggregation::Avg => Ratio::new(sizes.len() as u64, sizes.iter().sum()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredExplanation {
    pub explanation: Explanation,
    pub par: Score,
    pub resp: Score,
    pub gen: Option<Score>,
    pub resp_n: Option<Score>,
}

impl ScoredExplanation {
    pub fn get(&self, key: &str) -> Result<Option<Score>, ScoreError> {
        Ok(match key {
            "par" => Some(self.par),
            "resp" => Some(self.resp),
            "gen" => self.gen,
            "resp_n" => self.resp_n,
            other => return Err(ScoreError::UnknownKey(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureScores {
    pub feature: usize,
    pub fi: Score,
    pub fg: Option<Score>,
    pub fr: Option<Score>,
}

impl FeatureScores {
    pub fn get(&self, key: &str) -> Result<Option<Score>, ScoreError> {
        Ok(match key {
            "fi" => Some(self.fi),
            "fg" => self.fg,
            "fr" => self.fr,
            other => return Err(ScoreError::UnknownKey(other.to_string())),
        })
    }
}

/// Scores for one explanation set, optionally informed by the neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredReport {
    pub kind: ExplanationKind,
    pub explanations: Vec<ScoredExplanation>,
    pub features: Vec<FeatureScores>,
}

pub const EXPLANATION_KEYS: [&str; 4] = ["par", "gen", "resp", "resp_n"];
pub const FEATURE_KEYS: [&str; 3] = ["fi", "fg", "fr"];

impl ScoredReport {
    pub fn compute(
        set: &ExplanationSet,
        ne: Option<&NeighborhoodExplanations>,
        n_features: usize,
        aggr: Aggregation,
    ) -> ScoredReport {
        let ne = ne.filter(|ne| ne.kind == set.kind);
        let resp = score_responsibility(set);
        let explanations = set
            .explanations
            .iter()
            .map(|e| ScoredExplanation {
                explanation: e.clone(),
                par: score_parsimony(e),
                resp: resp.expect("non-empty set"),
                gen: ne.and_then(|ne| score_generality(e, ne)),
                resp_n: ne.and_then(|ne| score_responsibility_neighborhood(e, ne)),
            })
            .collect();
        let features = if set.is_empty() {
            Vec::new()
        } else {
            (0..n_features)
                .map(|k| FeatureScores {
                    feature: k,
                    fi: score_feature_involvement(k, set).expect("non-empty set"),
                    fg: ne.and_then(|ne| score_feature_generality(k, ne)),
                    fr: score_feature_responsibility(k, set, aggr),
                })
                .collect()
        };
        ScoredReport {
            kind: set.kind,
            explanations,
            features,
        }
    }

    /// Explanation positions ordered by `key`. Ties, including absent
    /// scores, fall back to size then feature indices; absent scores sort
    /// last either way.
    pub fn rank_explanations(&self, key: &str, descending: bool) -> Result<Vec<usize>, ScoreError> {
        let keys = self
            .explanations
            .iter()
            .map(|s| s.get(key))
            .collect::<Result<Vec<_>, _>>()?;
        let mut order: Vec<usize> = (0..self.explanations.len()).collect();
        order.sort_by(|&a, &b| {
            cmp_scores(keys[a], keys[b], descending).then_with(|| {
                self.explanations[a]
                    .explanation
                    .canonical_cmp(&self.explanations[b].explanation)
            })
        });
        Ok(order)
    }

    /// Feature indices ordered by `key`; ties go to the lower index.
    pub fn rank_features(&self, key: &str, descending: bool) -> Result<Vec<usize>, ScoreError> {
        let keys = self
            .features
            .iter()
            .map(|s| s.get(key))
            .collect::<Result<Vec<_>, _>>()?;
        let mut order: Vec<usize> = (0..self.features.len()).collect();
        order.sort_by(|&a, &b| cmp_scores(keys[a], keys[b], descending).then(a.cmp(&b)));
        Ok(order
            .into_iter()
            .map(|i| self.features[i].feature)
            .collect())
    }
}

fn cmp_scores(a: Option<Score>, b: Option<Score>, descending: bool) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) if descending => y.cmp(&x),
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}
