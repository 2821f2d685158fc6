//! Workload generators for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satexplain_core::{Cnf, DecisionTree, Instance, Lit, RandomForest, TreeNode, Var};

/// Uniform random 3-CNF with `vars` variables and `clauses` clauses.
pub fn random_3cnf(vars: u32, clauses: usize, seed: u64) -> Cnf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cnf = Cnf::with_num_vars(vars);
    for _ in 0..clauses {
        cnf.add((0..3).map(|_| Lit::new(Var::new(rng.gen_range(1..=vars)), rng.gen())));
    }
    cnf
}

fn random_node(rng: &mut ChaCha8Rng, n: usize, depth: usize, used: &mut [bool]) -> TreeNode {
    let free: Vec<usize> = (0..n).filter(|&f| !used[f]).collect();
    if depth == 0 || free.is_empty() || rng.gen_bool(0.1) {
        return TreeNode::leaf(rng.gen());
    }
    let f = free[rng.gen_range(0..free.len())];
    used[f] = true;
    let z = random_node(rng, n, depth - 1, used);
    let o = random_node(rng, n, depth - 1, used);
    used[f] = false;
    TreeNode::split(f, z, o)
}

/// `trees` random trees of depth at most `depth` over `n` features.
pub fn random_forest(n: usize, trees: usize, depth: usize, seed: u64) -> RandomForest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees = (0..trees)
        .map(|_| DecisionTree::new(random_node(&mut rng, n, depth, &mut vec![false; n])))
        .collect();
    RandomForest::new(n, trees).expect("valid forest")
}

/// Rows labeled by a fixed rule over the first seven features.
pub fn labeled_rows(n: usize, rows: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rows)
        .map(|_| {
            let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let y = (x[0] && x[1]) || (x[2] && !x[3]) || (x[4] && x[5] && x[6]);
            Instance::labeled(x, y)
        })
        .collect()
}

pub fn random_instance(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Instance::new((0..n).map(|_| rng.gen()).collect())
}
