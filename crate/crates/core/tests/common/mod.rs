//! Generators and brute-force oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use satexplain_core::formula::Assignment;
use satexplain_core::{DecisionTree, Formula, Lit, RandomForest, SoftSubset, TreeNode, Var};

pub fn bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

pub fn random_node<R: Rng>(rng: &mut R, n: usize, depth: usize, used: &mut Vec<bool>) -> TreeNode {
    let free: Vec<usize> = (0..n).filter(|&f| !used[f]).collect();
    if depth == 0 || free.is_empty() || rng.gen_bool(0.25) {
        return TreeNode::leaf(rng.gen());
    }
    let f = free[rng.gen_range(0..free.len())];
    used[f] = true;
    let z = random_node(rng, n, depth - 1, used);
    let o = random_node(rng, n, depth - 1, used);
    used[f] = false;
    TreeNode::split(f, z, o)
}

/// Random forest with `1..=max_trees` trees of depth at most `max_depth`
/// over `n` features, strict-majority threshold.
pub fn random_forest<R: Rng>(
    rng: &mut R,
    n: usize,
    max_trees: usize,
    max_depth: usize,
) -> RandomForest {
    let m = rng.gen_range(1..=max_trees);
    let trees = (0..m)
        .map(|_| DecisionTree::new(random_node(rng, n, max_depth, &mut vec![false; n])))
        .collect();
    RandomForest::new(n, trees).unwrap()
}

/// A forest that predicts both classes somewhere.
pub fn random_nonconstant_forest<R: Rng>(
    rng: &mut R,
    n: usize,
    max_trees: usize,
    max_depth: usize,
) -> RandomForest {
    loop {
        let rf = random_forest(rng, n, max_trees, max_depth);
        let mut seen = [false; 2];
        for mask in 0..1u64 << n {
            seen[usize::from(rf.predict(&bits(mask, n)).unwrap())] = true;
        }
        if seen[0] && seen[1] {
            return rf;
        }
    }
}

pub fn random_formula<R: Rng>(rng: &mut R, nvars: u32, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..12) {
            0 => Formula::Const(rng.gen()),
            _ => Formula::lit(Lit::new(Var::new(rng.gen_range(1..=nvars)), rng.gen())),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_formula(rng, nvars, depth - 1)),
        1 | 2 => {
            let k = rng.gen_range(1..=3);
            Formula::And(
                (0..k)
                    .map(|_| random_formula(rng, nvars, depth - 1))
                    .collect(),
            )
        }
        _ => {
            let k = rng.gen_range(1..=3);
            Formula::Or(
                (0..k)
                    .map(|_| random_formula(rng, nvars, depth - 1))
                    .collect(),
            )
        }
    }
}

/// Truth-table satisfiability over variables `1..=nvars`.
pub fn brute_sat(f: &Formula, nvars: usize) -> bool {
    (0..1u64 << nvars).any(|m| f.evaluate(&Assignment::from_bits(&bits(m, nvars))).unwrap())
}

fn minimal(sets: Vec<u64>) -> Vec<u64> {
    sets.iter()
        .copied()
        .filter(|&s| !sets.iter().any(|&t| t != s && t & s == t))
        .collect()
}

fn mask_to_subset(m: u64, n: usize) -> SoftSubset {
    SoftSubset::new((0..n).filter(|i| m >> i & 1 == 1))
}

/// Subset-minimal sets of features that, fixed to their values in `x`,
/// force the forest's prediction on `x` whatever the other features are.
pub fn brute_sufficient_reasons(rf: &RandomForest, x: &[bool]) -> BTreeSet<SoftSubset> {
    let n = x.len();
    let target = rf.predict(x).unwrap();
    let xm: u64 = (0..n).filter(|&i| x[i]).map(|i| 1u64 << i).sum();
    let full = (1u64 << n) - 1;
    let sufficient: Vec<u64> = (0..=full)
        .filter(|&s| {
            let free = full & !s;
            // Enumerate every completion of x outside s.
            let mut sub = free;
            loop {
                let v = (xm & s) | sub;
                if rf.predict(&bits(v, n)).unwrap() != target {
                    return false;
                }
                if sub == 0 {
                    return true;
                }
                sub = (sub - 1) & free;
            }
        })
        .collect();
    minimal(sufficient)
        .into_iter()
        .map(|m| mask_to_subset(m, n))
        .collect()
}

/// Subset-minimal sets of features whose flip changes the prediction.
pub fn brute_counterfactuals(rf: &RandomForest, x: &[bool]) -> BTreeSet<SoftSubset> {
    let n = x.len();
    let target = rf.predict(x).unwrap();
    let xm: u64 = (0..n).filter(|&i| x[i]).map(|i| 1u64 << i).sum();
    let flips: Vec<u64> = (0..1u64 << n)
        .filter(|&s| rf.predict(&bits(xm ^ s, n)).unwrap() != target)
        .collect();
    minimal(flips)
        .into_iter()
        .map(|m| mask_to_subset(m, n))
        .collect()
}

/// Minimal hitting sets by exhaustive search over subsets of `0..n`.
pub fn brute_hitting_sets(family: &[SoftSubset], n: usize) -> BTreeSet<SoftSubset> {
    let hits = |m: u64| {
        family
            .iter()
            .all(|s| s.indices().iter().any(|&e| m >> e & 1 == 1))
    };
    let all: Vec<u64> = (0..1u64 << n).filter(|&m| hits(m)).collect();
    minimal(all)
        .into_iter()
        .map(|m| mask_to_subset(m, n))
        .collect()
}

pub fn as_set(v: &[SoftSubset]) -> BTreeSet<SoftSubset> {
    v.iter().cloned().collect()
}
