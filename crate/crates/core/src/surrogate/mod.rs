//! Local random-forest surrogate: neighborhood sampling, black-box labeling,
//! tree induction and fidelity.

mod oracle;
mod sample;
mod train;
mod tree;

pub use oracle::{label, FnOracle, Oracle, OracleError, Precomputed, Subprocess};
pub use sample::{sample_neighborhood, NeighborhoodSet, Sampler};
pub use train::{fidelity, train_forest, train_tree, ForestParams};
pub use tree::{DecisionTree, RandomForest, TreeNode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurrogateError {
    #[error("no training data")]
    EmptyData,
    #[error("row {0} has no label")]
    MissingLabel(usize),
    #[error("expected {expected} features, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("forest has no trees")]
    EmptyForest,
    #[error("threshold {threshold} is outside 1..={trees}")]
    InvalidThreshold { threshold: usize, trees: usize },
    #[error("feature {feature} is out of range for {n} features")]
    FeatureOutOfRange { feature: usize, n: usize },
    #[error("feature {0} is tested twice on one path")]
    RepeatedFeature(usize),
    #[error("neighborhood contains only the instance itself")]
    EmptyNeighborhood,
    #[error("perturbation sampling needs at least one sample")]
    InvalidSampleCount,
}
