use serde::{Deserialize, Serialize};

use super::SurrogateError;

/// A binary decision tree node. Internal nodes test one feature and branch
/// on its value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Leaf {
        #[serde(with = "crate::data::bit")]
        leaf: bool,
    },
    Split {
        feature: usize,
        zero: Box<TreeNode>,
        one: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf(class: bool) -> TreeNode {
        TreeNode::Leaf { leaf: class }
    }

    pub fn split(feature: usize, zero: TreeNode, one: TreeNode) -> TreeNode {
        TreeNode::Split {
            feature,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { zero, one, .. } => zero.num_leaves() + one.num_leaves(),
        }
    }

    fn check(&self, n: usize, on_path: &mut Vec<bool>) -> Result<(), SurrogateError> {
        if let TreeNode::Split { feature, zero, one } = self {
            let f = *feature;
            if f >= n {
                return Err(SurrogateError::FeatureOutOfRange { feature: f, n });
            }
            if on_path[f] {
                return Err(SurrogateError::RepeatedFeature(f));
            }
            on_path[f] = true;
            zero.check(n, on_path)?;
            one.check(n, on_path)?;
            on_path[f] = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionTree {
    pub root: TreeNode,
}

impl DecisionTree {
    pub fn new(root: TreeNode) -> DecisionTree {
        DecisionTree { root }
    }

    /// Panics if `x` is shorter than a tested feature index.
    pub fn predict(&self, x: &[bool]) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { leaf } => return *leaf,
                TreeNode::Split { feature, zero, one } => {
                    node = if x[*feature] { one } else { zero };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Checks feature bounds and that no path tests a feature twice.
    pub fn validate(&self, n_features: usize) -> Result<(), SurrogateError> {
        self.root.check(n_features, &mut vec![false; n_features])
    }
}

/// Majority-vote ensemble: predicts 1 iff at least `threshold` trees do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_features: usize,
    pub threshold: usize,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Builds a forest with the strict-majority threshold `m/2 + 1`.
    pub fn new(
        n_features: usize,
        trees: Vec<DecisionTree>,
    ) -> Result<RandomForest, SurrogateError> {
        let threshold = trees.len() / 2 + 1;
        let rf = RandomForest {
            n_features,
            threshold,
            trees,
        };
        rf.validate()?;
        Ok(rf)
    }

    pub fn majority(m: usize) -> usize {
        m / 2 + 1
    }

    pub fn validate(&self) -> Result<(), SurrogateError> {
        if self.trees.is_empty() {
            return Err(SurrogateError::EmptyForest);
        }
        if self.threshold == 0 || self.threshold > self.trees.len() {
            return Err(SurrogateError::InvalidThreshold {
                threshold: self.threshold,
                trees: self.trees.len(),
            });
        }
        for t in &self.trees {
            t.validate(self.n_features)?;
        }
        Ok(())
    }

    pub fn votes(&self, x: &[bool]) -> Result<usize, SurrogateError> {
        if x.len() != self.n_features {
            return Err(SurrogateError::ArityMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(self.trees.iter().filter(|t| t.predict(x)).count())
    }

    pub fn predict(&self, x: &[bool]) -> Result<bool, SurrogateError> {
        Ok(self.votes(x)? >= self.threshold)
    }
}
