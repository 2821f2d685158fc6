use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, RandomForest, TreeNode};
use super::{NeighborhoodSet, SurrogateError};
use crate::data::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Nodes with fewer rows than this become leaves.
    pub min_leaf: usize,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 10,
            max_depth: 24,
            min_leaf: 2,
            bootstrap: true,
        }
    }
}

struct Rows<'a> {
    x: Vec<&'a [bool]>,
    y: Vec<bool>,
    n: usize,
}

impl<'a> Rows<'a> {
    fn from_instances(rows: &'a [Instance]) -> Result<Rows<'a>, SurrogateError> {
        let first = rows.first().ok_or(SurrogateError::EmptyData)?;
        let n = first.len();
        let mut x = Vec::with_capacity(rows.len());
        let mut y = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(SurrogateError::ArityMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            x.push(r.values.as_slice());
            y.push(r.label.ok_or(SurrogateError::MissingLabel(i))?);
        }
        Ok(Rows { x, y, n })
    }
}

/// Gini impurity of a node holding `pos` positives out of `total`, scaled
/// by `total` so children can be summed directly.
fn weighted_gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    total as f64 * 2.0 * p * (1.0 - p)
}

struct Builder<'r, 'a, R> {
    rows: &'r Rows<'a>,
    params: &'r ForestParams,
    rng: R,
    subset: usize,
}

impl<R: Rng> Builder<'_, '_, R> {
    fn majority(&self, idx: &[usize]) -> bool {
        let pos = idx.iter().filter(|&&i| self.rows.y[i]).count();
        2 * pos > idx.len()
    }

    /// Lowest-impurity non-degenerate split among `features`; ties go to the
    /// earlier feature.
    fn best_split(&self, idx: &[usize], features: &[usize]) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &f in features {
            let (mut n1, mut p1, mut p0) = (0usize, 0usize, 0usize);
            for &i in idx {
                if self.rows.x[i][f] {
                    n1 += 1;
                    p1 += usize::from(self.rows.y[i]);
                } else {
                    p0 += usize::from(self.rows.y[i]);
                }
            }
            let n0 = idx.len() - n1;
            if n0 == 0 || n1 == 0 {
                continue;
            }
            let g = weighted_gini(p0, n0) + weighted_gini(p1, n1);
            if best.is_none_or(|(bg, _)| g < bg - 1e-12) {
                best = Some((g, f));
            }
        }
        best.map(|(_, f)| f)
    }

    fn grow(&mut self, idx: &[usize], used: &mut [bool], depth: usize) -> TreeNode {
        let pos = idx.iter().filter(|&&i| self.rows.y[i]).count();
        if depth >= self.params.max_depth
            || pos == 0
            || pos == idx.len()
            || idx.len() < self.params.min_leaf
        {
            return TreeNode::leaf(self.majority(idx));
        }
        let free: Vec<usize> = (0..self.rows.n).filter(|&f| !used[f]).collect();
        if free.is_empty() {
            return TreeNode::leaf(self.majority(idx));
        }
        let k = self.subset.min(free.len());
        let mut drawn: Vec<usize> = sample(&mut self.rng, free.len(), k)
            .into_iter()
            .map(|j| free[j])
            .collect();
        drawn.sort_unstable();
        let feature = match self.best_split(idx, &drawn) {
            Some(f) => f,
            None => match self.best_split(idx, &free) {
                Some(f) => f,
                None => return TreeNode::leaf(self.majority(idx)),
            },
        };
        let (one, zero): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.rows.x[i][feature]);
        used[feature] = true;
        let z = self.grow(&zero, used, depth + 1);
        let o = self.grow(&one, used, depth + 1);
        used[feature] = false;
        match (&z, &o) {
            (TreeNode::Leaf { leaf: a }, TreeNode::Leaf { leaf: b }) if a == b => z,
            _ => TreeNode::split(feature, z, o),
        }
    }
}

/// CART induction with Gini impurity. At each node a random subset of
/// `ceil(sqrt(n))` untested features is scored; if none of them separates
/// the rows, all untested features are tried.
pub fn train_tree<R: Rng>(
    rows: &[Instance],
    params: &ForestParams,
    rng: &mut R,
) -> Result<DecisionTree, SurrogateError> {
    let data = Rows::from_instances(rows)?;
    let idx: Vec<usize> = (0..rows.len()).collect();
    Ok(build(&data, &idx, params, rng))
}

fn build<R: Rng>(
    data: &Rows<'_>,
    idx: &[usize],
    params: &ForestParams,
    rng: &mut R,
) -> DecisionTree {
    let subset = (data.n as f64).sqrt().ceil().max(1.0) as usize;
    let mut b = Builder {
        rows: data,
        params,
        rng,
        subset,
    };
    let mut used = vec![false; data.n];
    DecisionTree::new(b.grow(idx, &mut used, 0))
}

/// Trains `params.n_trees` trees in parallel. Tree `i` draws from its own
/// ChaCha stream `i` under `seed`, so the result does not depend on thread
/// scheduling.
pub fn train_forest(
    rows: &[Instance],
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest, SurrogateError> {
    if params.n_trees == 0 {
        return Err(SurrogateError::EmptyForest);
    }
    let data = Rows::from_instances(rows)?;
    let trees: Vec<DecisionTree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let idx: Vec<usize> = if params.bootstrap {
                (0..rows.len())
                    .map(|_| rng.gen_range(0..rows.len()))
                    .collect()
            } else {
                (0..rows.len()).collect()
            };
            build(&data, &idx, params, &mut rng)
        })
        .collect();
    RandomForest::new(data.n, trees)
}

/// Fraction of labeled members on which the forest agrees with the label.
pub fn fidelity(rf: &RandomForest, ns: &NeighborhoodSet) -> Result<f64, SurrogateError> {
    if ns.members.is_empty() {
        return Ok(1.0);
    }
    let mut agree = 0usize;
    for (i, m) in ns.members.iter().enumerate() {
        let label = m.label.ok_or(SurrogateError::MissingLabel(i))?;
        if rf.predict(&m.values)? == label {
            agree += 1;
        }
    }
    Ok(agree as f64 / ns.members.len() as f64)
}
