//! Model-agnostic symbolic explanations for binary classifiers.
//!
//! The pipeline trains a random-forest surrogate around an instance, compiles
//! the forest into CNF, and reads sufficient reasons and counterfactuals off
//! the minimal unsatisfiable and minimal correction subsets of the resulting
//! partial Max-SAT instance. Scores over explanations and features rank the
//! results.

pub mod data;
pub mod encoder;
pub mod explain;
pub mod formula;
pub mod sat;
pub mod scoring;
pub mod surrogate;

pub use data::{hamming, DataError, Dataset, Instance};
pub use encoder::{
    build_pmaxsat, default_feature_names, encode_forest, encode_instance, tree_to_formula,
    CnfModel, EncodeError, PartialMaxSatInstance, Polarity, SoftOrigin, VarMapFile,
};
pub use explain::{
    explain_instance, explain_neighborhood, ExplainError, Explainer, InstanceExplanations,
};
pub use formula::{Clause, Cnf, Formula, Lit, Var, VarPool};
pub use sat::{
    enumerate_mcs, enumerate_mus, minimal_hitting_sets, solve, EnumError, Enumeration,
    EnumerationBudget, SatResult, SoftSubset, Solver,
};
pub use scoring::{
    Aggregation, Explanation, ExplanationKind, ExplanationSet, NeighborhoodExplanations, Score,
    ScoredReport,
};
pub use surrogate::{
    DecisionTree, ForestParams, NeighborhoodSet, Oracle, RandomForest, Sampler, TreeNode,
};
