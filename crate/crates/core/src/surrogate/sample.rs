use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SurrogateError;
use crate::data::{hamming, Dataset, Instance};

/// Instances within Hamming distance `radius` of `center`. The center is
/// always the first member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodSet {
    pub center: Instance,
    pub radius: usize,
    pub members: Vec<Instance>,
}

impl NeighborhoodSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.members.iter().all(|m| m.label.is_some())
    }

    /// Members sorted by distance to the center; stable within a distance.
    pub fn nearest_first(&self) -> Vec<&Instance> {
        let mut v: Vec<&Instance> = self.members.iter().collect();
        v.sort_by_key(|m| hamming(&m.values, &self.center.values));
        v
    }
}

/// Where neighbors come from.
#[derive(Debug, Clone, Copy)]
pub enum Sampler<'a> {
    /// Rows of a dataset. Falls back to `fallback` perturbed samples when no
    /// row other than the center lies in the ball.
    Dataset { data: &'a Dataset, fallback: usize },
    /// `samples` distinct perturbations of the center.
    Perturb { samples: usize },
}

/// Number of points at distance 1..=r from a point in {0,1}^n, saturating.
fn ball_size(n: usize, r: usize) -> usize {
    let mut total: usize = 0;
    let mut c: u128 = 1;
    for k in 1..=r.min(n) {
        c = c * (n - k + 1) as u128 / k as u128;
        total = total.saturating_add(usize::try_from(c).unwrap_or(usize::MAX));
    }
    total
}

fn perturb(x: &Instance, r: usize, p: usize, seed: u64) -> Vec<Instance> {
    let n = x.len();
    let r = r.min(n);
    let mut out = vec![Instance::new(x.values.clone())];
    if r == 0 || p == 0 {
        return out;
    }
    if ball_size(n, r) <= p {
        // The whole ball fits in the budget: list it by distance, then
        // lexicographically.
        for k in 1..=r {
            let mut comb: Vec<usize> = (0..k).collect();
            loop {
                out.push(x.flipped(comb.iter().copied()));
                let Some(i) = (0..k).rev().find(|&i| comb[i] < n - k + i) else {
                    break;
                };
                comb[i] += 1;
                for j in i + 1..k {
                    comb[j] = comb[j - 1] + 1;
                }
            }
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    seen.insert(x.values.clone());
    while out.len() < p + 1 {
        let k = rng.gen_range(1..=r);
        let v = x.flipped(sample(&mut rng, n, k));
        if seen.insert(v.values.clone()) {
            out.push(v);
        }
    }
    out
}

/// Samples the neighborhood of `x` at Hamming radius `r`. Deterministic in
/// `seed`. Dataset rows keep their labels; duplicates of a vector keep only
/// the first occurrence.
pub fn sample_neighborhood(
    x: &Instance,
    r: usize,
    sampler: Sampler<'_>,
    seed: u64,
) -> Result<NeighborhoodSet, SurrogateError> {
    if x.is_empty() {
        return Err(SurrogateError::EmptyData);
    }
    let center = Instance::new(x.values.clone());
    let members = match sampler {
        Sampler::Perturb { samples } => {
            if samples == 0 && r > 0 {
                return Err(SurrogateError::InvalidSampleCount);
            }
            perturb(x, r, samples, seed)
        }
        Sampler::Dataset { data, fallback } => {
            if data.num_features() != x.len() {
                return Err(SurrogateError::ArityMismatch {
                    expected: data.num_features(),
                    got: x.len(),
                });
            }
            let mut seen: HashSet<&[bool]> = HashSet::new();
            let mut own: Option<Instance> = None;
            let mut rest = Vec::new();
            for row in &data.rows {
                if hamming(&row.values, &x.values) > r || !seen.insert(&row.values) {
                    continue;
                }
                if row.values == x.values {
                    own = Some(row.clone());
                } else {
                    rest.push(row.clone());
                }
            }
            if rest.is_empty() && r > 0 {
                if fallback == 0 {
                    return Err(SurrogateError::EmptyNeighborhood);
                }
                let mut m = perturb(x, r, fallback, seed);
                if let Some(o) = own {
                    m[0] = o;
                }
                m
            } else {
                let mut m = vec![own.unwrap_or_else(|| center.clone())];
                m.extend(rest);
                m
            }
        }
    };
    Ok(NeighborhoodSet {
        center,
        radius: r,
        members,
    })
}
