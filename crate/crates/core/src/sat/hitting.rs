use std::collections::BTreeMap;
use std::time::Instant;

use super::{SatError, SoftSubset};

/// All inclusion-minimal hitting sets of `family`, in canonical order
/// (by size, then lexicographically).
///
/// The empty family is hit by the empty set; a family containing an empty
/// member has no hitting set.
pub fn minimal_hitting_sets(family: &[SoftSubset]) -> Vec<SoftSubset> {
    match hitting_sets_within(family, None, None) {
        Ok((sets, _)) => sets,
        Err(_) => unreachable!("no deadline given"),
    }
}

/// Budgeted variant. Returns the sets found and whether the enumeration ran
/// to completion (`false` when `max` cut it short).
pub fn hitting_sets_within(
    family: &[SoftSubset],
    deadline: Option<Instant>,
    max: Option<usize>,
) -> Result<(Vec<SoftSubset>, bool), SatError> {
    if family.iter().any(|s| s.is_empty()) {
        return Ok((Vec::new(), true));
    }
    // Dense renumbering of the elements that occur.
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    for s in family {
        for &e in s.indices() {
            let next = ids.len();
            ids.entry(e).or_insert(next);
        }
    }
    // Keep element ids in ascending original order.
    for (k, (_, id)) in ids.iter_mut().enumerate() {
        *id = k;
    }
    let elems: Vec<usize> = ids.keys().copied().collect();
    let sets: Vec<Vec<usize>> = family
        .iter()
        .map(|s| s.indices().iter().map(|e| ids[e]).collect())
        .collect();
    let mut member_of = vec![Vec::new(); elems.len()];
    for (sid, s) in sets.iter().enumerate() {
        for &e in s {
            member_of[e].push(sid);
        }
    }
    let mut search = Mmcs {
        sets: &sets,
        member_of: &member_of,
        cand: vec![true; elems.len()],
        crit: vec![Vec::new(); elems.len()],
        current: Vec::new(),
        out: Vec::new(),
        deadline,
        max,
        ticks: 0,
        stopped: false,
    };
    let uncov: Vec<usize> = (0..sets.len()).collect();
    search.run(&uncov)?;
    let complete = !search.stopped;
    let mut out: Vec<SoftSubset> = search
        .out
        .into_iter()
        .map(|s| SoftSubset::new(s.into_iter().map(|e| elems[e])))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok((out, complete))
}

/// Minimal hitting set search with candidate restriction and critical-set
/// bookkeeping: each element of the partial set must keep at least one set
/// that only it hits, which rules out non-minimal branches early and makes
/// every minimal hitting set appear exactly once.
struct Mmcs<'a> {
    sets: &'a [Vec<usize>],
    member_of: &'a [Vec<usize>],
    cand: Vec<bool>,
    crit: Vec<Vec<usize>>,
    current: Vec<usize>,
    out: Vec<Vec<usize>>,
    deadline: Option<Instant>,
    max: Option<usize>,
    ticks: u32,
    stopped: bool,
}

impl Mmcs<'_> {
    fn run(&mut self, uncov: &[usize]) -> Result<(), SatError> {
        if self.stopped {
            return Ok(());
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(256) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(SatError::Timeout);
                }
            }
        }
        if uncov.is_empty() {
            if self.max.is_some_and(|m| self.out.len() >= m) {
                self.stopped = true;
                return Ok(());
            }
            self.out.push(self.current.clone());
            return Ok(());
        }
        // Branch on the uncovered set with the fewest candidates.
        let &pick = uncov
            .iter()
            .min_by_key(|&&s| self.sets[s].iter().filter(|&&e| self.cand[e]).count())
            .unwrap();
        let branch: Vec<usize> = self.sets[pick]
            .iter()
            .copied()
            .filter(|&e| self.cand[e])
            .collect();
        for &e in &branch {
            self.cand[e] = false;
        }
        for &e in &branch {
            let saved: Vec<(usize, Vec<usize>)> = self
                .current
                .iter()
                .map(|&f| (f, self.crit[f].clone()))
                .collect();
            let mut viable = true;
            for &f in &self.current {
                self.crit[f].retain(|s| !self.member_of[e].contains(s));
                if self.crit[f].is_empty() {
                    viable = false;
                }
            }
            if viable {
                let (hit, rest): (Vec<usize>, Vec<usize>) =
                    uncov.iter().partition(|s| self.member_of[e].contains(s));
                self.crit[e] = hit;
                self.current.push(e);
                let r = self.run(&rest);
                self.current.pop();
                self.crit[e].clear();
                if r.is_err() {
                    for (f, c) in saved {
                        self.crit[f] = c;
                    }
                    return r;
                }
            }
            for (f, c) in saved {
                self.crit[f] = c;
            }
            self.cand[e] = true;
            if self.stopped {
                break;
            }
        }
        for &e in &branch {
            self.cand[e] = true;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(sets: &[&[usize]]) -> Vec<SoftSubset> {
        sets.iter()
            .map(|s| SoftSubset::new(s.iter().copied()))
            .collect()
    }

    /// Subset-lattice oracle.
    fn brute(family: &[SoftSubset], universe: usize) -> Vec<SoftSubset> {
        let hits = |mask: u32| {
            family
                .iter()
                .all(|s| s.indices().iter().any(|&e| mask >> e & 1 == 1))
        };
        let mut out: Vec<SoftSubset> = (0u32..1 << universe)
            .filter(|&m| hits(m) && (0..universe).all(|e| m >> e & 1 == 0 || !hits(m & !(1 << e))))
            .map(|m| SoftSubset::new((0..universe).filter(|e| m >> e & 1 == 1)))
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    #[test]
    fn single_set() {
        assert_eq!(minimal_hitting_sets(&fam(&[&[1, 2]])), fam(&[&[1], &[2]]));
    }

    #[test]
    fn two_overlapping_sets() {
        assert_eq!(
            minimal_hitting_sets(&fam(&[&[1, 2], &[2, 3]])),
            fam(&[&[2], &[1, 3]])
        );
    }

    #[test]
    fn degenerate_families() {
        assert_eq!(minimal_hitting_sets(&[]), vec![SoftSubset::new([])]);
        assert!(minimal_hitting_sets(&fam(&[&[1], &[]])).is_empty());
    }

    #[test]
    fn result_cap_marks_incomplete() {
        let (sets, complete) = hitting_sets_within(&fam(&[&[1, 2, 3]]), None, Some(2)).unwrap();
        assert_eq!(sets.len(), 2);
        assert!(!complete);
    }

    fn arb_family() -> impl Strategy<Value = Vec<SoftSubset>> {
        prop::collection::vec(prop::collection::btree_set(0usize..8, 1..5), 0..7)
            .prop_map(|v| v.into_iter().map(SoftSubset::new).collect())
    }

    fn minimize(family: &[SoftSubset]) -> Vec<SoftSubset> {
        let mut out: Vec<SoftSubset> = family
            .iter()
            .filter(|s| !family.iter().any(|t| t != *s && t.is_subset(s)))
            .cloned()
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out.dedup();
        out
    }

    proptest! {
        #[test]
        fn matches_brute_force(f in arb_family()) {
            prop_assert_eq!(minimal_hitting_sets(&f), brute(&f, 8));
        }

        #[test]
        fn double_duality(f in arb_family()) {
            let once = minimal_hitting_sets(&f);
            prop_assert_eq!(minimal_hitting_sets(&once), minimize(&f));
        }
    }
}
