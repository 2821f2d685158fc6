//! Sufficient reasons and counterfactuals of a forest's predictions.

use std::time::Instant;

use rayon::prelude::*;

use crate::data::Instance;
use crate::encoder::{
    build_pmaxsat, default_feature_names, encode_forest, encode_instance, CnfModel, EncodeError,
    PartialMaxSatInstance, Polarity,
};
use crate::sat::{enumerate_mcs, mus_from_mcs, EnumError, Enumeration, EnumerationBudget};
use crate::scoring::{Explanation, ExplanationKind, ExplanationSet, NeighborhoodExplanations};
use crate::surrogate::{NeighborhoodSet, RandomForest, SurrogateError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplainError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
    #[error(transparent)]
    Forest(#[from] SurrogateError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceExplanations {
    pub instance: Instance,
    pub prediction: bool,
    pub polarity: Polarity,
    pub sr: ExplanationSet,
    pub cf: ExplanationSet,
    /// Set when the lists are empty or partial for a reason other than the
    /// instance having no explanations.
    pub note: Option<String>,
}

impl InstanceExplanations {
    pub fn set(&self, kind: ExplanationKind) -> &ExplanationSet {
        match kind {
            ExplanationKind::Sr => &self.sr,
            ExplanationKind::Cf => &self.cf,
        }
    }
}

/// A forest compiled once for one polarity, reusable across instances.
#[derive(Debug, Clone)]
pub struct Explainer<'a> {
    rf: &'a RandomForest,
    model: CnfModel,
}

impl<'a> Explainer<'a> {
    /// Fails with [`EncodeError::HardUnsat`] when the forest never predicts
    /// the asserted class.
    pub fn new(rf: &'a RandomForest, polarity: Polarity) -> Result<Explainer<'a>, ExplainError> {
        let model = encode_forest(rf, polarity, &default_feature_names(rf.n_features))?;
        build_pmaxsat(&model, Vec::new())?;
        Ok(Explainer { rf, model })
    }

    pub fn model(&self) -> &CnfModel {
        &self.model
    }

    pub fn instance(&self, x: &Instance) -> Result<PartialMaxSatInstance, ExplainError> {
        let soft = encode_instance(x, &self.model.var_map)?;
        Ok(PartialMaxSatInstance::new(self.model.cnf.clone(), soft))
    }

    pub fn explain(
        &self,
        x: &Instance,
        budget: &EnumerationBudget,
    ) -> Result<InstanceExplanations, ExplainError> {
        let polarity = self.model.polarity;
        let prediction = self.rf.predict(&x.values)?;
        let x = Instance::new(x.values.clone());
        let empty = |kind, complete| ExplanationSet::new(x.clone(), kind, Vec::new(), complete);
        if prediction != polarity.explained_class() {
            return Ok(InstanceExplanations {
                instance: x.clone(),
                prediction,
                polarity,
                sr: empty(ExplanationKind::Sr, true),
                cf: empty(ExplanationKind::Cf, true),
                note: Some(format!(
                    "instance already predicted {}; zero explanations of kind SR/CF",
                    if prediction { "positive" } else { "negative" }
                )),
            });
        }
        let start = Instant::now();
        let p = self.instance(&x)?;
        let to_set = |kind, e: &Enumeration| {
            let items = e
                .subsets
                .iter()
                .map(|s| Explanation::from_subset(kind, s, p.origins()))
                .collect();
            ExplanationSet::new(x.clone(), kind, items, e.complete)
        };
        let mcs = enumerate_mcs(&p, budget)?;
        let cf = to_set(ExplanationKind::Cf, &mcs);
        let mut note = None;
        let sr = match mus_from_mcs(&p, &mcs, budget, start) {
            Ok(mus) => {
                if !mus.complete {
                    note = Some("sufficient-reason enumeration hit the result cap".to_string());
                }
                to_set(ExplanationKind::Sr, &mus)
            }
            Err(EnumError::Incomplete) => {
                note = Some(
                    "counterfactual enumeration is incomplete, so sufficient reasons were not derived"
                        .to_string(),
                );
                empty(ExplanationKind::Sr, false)
            }
            Err(EnumError::Timeout) => {
                note = Some("sufficient-reason enumeration timed out".to_string());
                empty(ExplanationKind::Sr, false)
            }
            Err(e) => return Err(e.into()),
        };
        if !cf.complete && note.is_none() {
            note = Some("counterfactual enumeration stopped early".to_string());
        }
        Ok(InstanceExplanations {
            instance: x,
            prediction,
            polarity,
            sr,
            cf,
            note,
        })
    }
}

/// Sufficient reasons (minimal unsatisfiable subsets) and counterfactuals
/// (minimal correction subsets) of `rf`'s prediction on `x`.
pub fn explain_instance(
    rf: &RandomForest,
    x: &Instance,
    polarity: Polarity,
    budget: &EnumerationBudget,
) -> Result<InstanceExplanations, ExplainError> {
    Explainer::new(rf, polarity)?.explain(x, budget)
}

/// Explains up to `cap` members of `ns`, nearest first, that the forest
/// predicts like the center. Members are processed in parallel; the result
/// order follows the neighborhood order. Returns the SR and CF views.
pub fn explain_neighborhood(
    rf: &RandomForest,
    ns: &NeighborhoodSet,
    polarity: Polarity,
    budget: &EnumerationBudget,
    cap: usize,
) -> Result<(NeighborhoodExplanations, NeighborhoodExplanations), ExplainError> {
    let explainer = Explainer::new(rf, polarity)?;
    let target = rf.predict(&ns.center.values)?;
    let examined: Vec<&Instance> = ns.nearest_first().into_iter().take(cap.max(1)).collect();
    let same: Vec<&Instance> = examined
        .iter()
        .copied()
        .filter(|v| rf.predict(&v.values).map(|p| p == target).unwrap_or(false))
        .collect();
    let results: Vec<InstanceExplanations> = same
        .par_iter()
        .map(|v| explainer.explain(v, budget))
        .collect::<Result<_, _>>()?;
    let view = |kind| NeighborhoodExplanations {
        radius: ns.radius,
        kind,
        sampled: ns.len(),
        examined: examined.len(),
        sets: results.iter().map(|r| r.set(kind).clone()).collect(),
    };
    Ok((view(ExplanationKind::Sr), view(ExplanationKind::Cf)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::tests::{vote_forest, vote_x};
    use crate::surrogate::{sample_neighborhood, Sampler};

    fn names(set: &ExplanationSet) -> Vec<Vec<usize>> {
        set.explanations
            .iter()
            .map(|e| e.features().map(|f| f + 1).collect())
            .collect()
    }

    #[test]
    fn vote_example() {
        let r = explain_instance(
            &vote_forest(),
            &vote_x(),
            Polarity::Negative,
            &EnumerationBudget::default(),
        )
        .unwrap();
        assert!(!r.prediction);
        assert_eq!(names(&r.sr), vec![vec![4, 5], vec![5, 12], vec![4, 9, 12]]);
        assert_eq!(
            names(&r.cf),
            vec![vec![4, 5], vec![4, 12], vec![5, 9], vec![5, 12]]
        );
        assert!(r.sr.complete && r.cf.complete && r.note.is_none());
        assert!(r.sr.explanations[0].items.iter().all(|o| !o.value));
    }

    #[test]
    fn opposite_prediction_yields_nothing() {
        let r = explain_instance(
            &vote_forest(),
            &vote_x(),
            Polarity::Positive,
            &EnumerationBudget::default(),
        )
        .unwrap();
        assert!(r.sr.is_empty() && r.cf.is_empty());
        assert!(r.note.unwrap().contains("already predicted negative"));
    }

    #[test]
    fn neighborhood_contains_center_first() {
        let rf = vote_forest();
        let x = vote_x();
        let ns = sample_neighborhood(&x, 2, Sampler::Perturb { samples: 20 }, 5).unwrap();
        let (sr, cf) = explain_neighborhood(
            &rf,
            &ns,
            Polarity::Negative,
            &EnumerationBudget::default(),
            10,
        )
        .unwrap();
        assert_eq!(sr.examined, 10);
        assert_eq!(sr.sampled, 21);
        assert_eq!(sr.sets[0].instance, x);
        assert_eq!(names(&cf.sets[0]).len(), 4);
        assert!(sr.sets.len() <= 10);
    }
}
