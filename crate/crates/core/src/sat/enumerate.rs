use std::time::Instant;

use crate::encoder::PartialMaxSatInstance;
use crate::formula::Lit;

use super::hitting::hitting_sets_within;
use super::solver::{SatResult, Solver};
use super::{EnumError, Enumeration, EnumerationBudget, SatError, SoftSubset};

/// Incremental solver over the hard clauses with one selector per soft
/// clause (`sel_i -> soft_i`) and an activation literal for blocking clauses.
struct SoftSolver<'a> {
    solver: Solver,
    selectors: Vec<Lit>,
    block: Lit,
    instance: &'a PartialMaxSatInstance,
}

impl<'a> SoftSolver<'a> {
    fn new(instance: &'a PartialMaxSatInstance, deadline: Option<Instant>) -> SoftSolver<'a> {
        let mut solver = Solver::from_cnf(instance.hard());
        for l in instance.soft() {
            solver.reserve_vars(l.var().index());
        }
        let selectors: Vec<Lit> = instance
            .soft()
            .iter()
            .map(|&l| {
                let s = solver.new_var().positive();
                solver.add_clause(&[!s, l]);
                s
            })
            .collect();
        let block = solver.new_var().positive();
        solver.set_deadline(deadline);
        SoftSolver {
            solver,
            selectors,
            block,
            instance,
        }
    }

    /// Satisfiability of hard clauses plus the soft clauses in `subset`.
    fn check(&mut self, subset: impl IntoIterator<Item = usize>) -> Result<SatResult, SatError> {
        let assumptions: Vec<Lit> = subset.into_iter().map(|i| self.selectors[i]).collect();
        self.solver.solve(&assumptions)
    }

    fn satisfied_soft(&self, r: &SatResult) -> Vec<bool> {
        let m = r.model().expect("model");
        self.instance.soft().iter().map(|&l| m.lit(l)).collect()
    }

    /// Extends `mss` (a satisfiable soft set, as a membership mask) clause by
    /// clause in index order; the result is maximal.
    fn grow(&mut self, mss: &mut [bool]) -> Result<(), SatError> {
        for i in 0..mss.len() {
            if mss[i] {
                continue;
            }
            let trial: Vec<usize> = (0..mss.len()).filter(|&j| mss[j] || j == i).collect();
            let r = self.check(trial)?;
            if r.is_sat() {
                for (k, sat) in self.satisfied_soft(&r).into_iter().enumerate() {
                    mss[k] |= sat;
                }
                debug_assert!(mss[i]);
            }
        }
        Ok(())
    }

    fn verify_mcs(&mut self, mcs: &SoftSubset) -> Result<(), EnumError> {
        let rest: Vec<usize> = (0..self.selectors.len())
            .filter(|i| !mcs.contains(*i))
            .collect();
        if !self.check(rest.iter().copied())?.is_sat() {
            return Err(EnumError::Verification(format!(
                "complement of {mcs} is unsatisfiable"
            )));
        }
        for &j in mcs.indices() {
            if self.check(rest.iter().copied().chain([j]))?.is_sat() {
                return Err(EnumError::Verification(format!(
                    "{mcs} is not minimal at {j}"
                )));
            }
        }
        Ok(())
    }

    /// Unsatisfiability is checked with the solver. Minimality follows from
    /// the complete MCS family: every element must be the only one hitting
    /// some MCS, whose complement then satisfies the rest of `mus`.
    fn verify_mus(&mut self, mus: &SoftSubset, mcs: &[SoftSubset]) -> Result<(), EnumError> {
        if self.check(mus.indices().iter().copied())?.is_sat() {
            return Err(EnumError::Verification(format!("{mus} is satisfiable")));
        }
        for &j in mus.indices() {
            let critical = mcs
                .iter()
                .any(|c| c.contains(j) && mus.indices().iter().all(|&i| i == j || !c.contains(i)));
            if !critical {
                return Err(EnumError::Verification(format!(
                    "{mus} is not minimal at {j}"
                )));
            }
        }
        Ok(())
    }
}

fn deadline_of(budget: &EnumerationBudget) -> Option<Instant> {
    budget.timeout.map(|t| Instant::now() + t)
}

/// Grows `seed` into a maximal satisfiable subset of the soft clauses.
/// Its complement is a minimal correction subset.
pub fn grow_mss(
    seed: &SoftSubset,
    instance: &PartialMaxSatInstance,
) -> Result<SoftSubset, EnumError> {
    let mut s = SoftSolver::new(instance, None);
    if !s.check(seed.indices().iter().copied())?.is_sat() {
        return Err(EnumError::SeedUnsat);
    }
    let mut mask = vec![false; instance.soft().len()];
    for &i in seed.indices() {
        mask[i] = true;
    }
    s.grow(&mut mask)?;
    Ok(SoftSubset::from_mask(&mask))
}

/// Enumerates minimal correction subsets of the soft clauses.
///
/// Each round asks for any assignment satisfying at least one soft literal
/// of every correction set found so far, grows the satisfied soft clauses
/// into a maximal satisfiable subset and records its complement. Every
/// result is re-checked against the definition before it is returned.
pub fn enumerate_mcs(
    instance: &PartialMaxSatInstance,
    budget: &EnumerationBudget,
) -> Result<Enumeration, EnumError> {
    let deadline = deadline_of(budget);
    let mut s = SoftSolver::new(instance, deadline);
    let mut found: Vec<SoftSubset> = Vec::new();
    let outcome = mcs_rounds(&mut s, budget, &mut found);
    match outcome {
        Ok(complete) => Ok(Enumeration {
            subsets: found,
            complete,
        }),
        Err(EnumError::Timeout) => Ok(Enumeration {
            subsets: found,
            complete: false,
        }),
        Err(e) => Err(e),
    }
}

fn mcs_rounds(
    s: &mut SoftSolver<'_>,
    budget: &EnumerationBudget,
    found: &mut Vec<SoftSubset>,
) -> Result<bool, EnumError> {
    let n = s.selectors.len();
    if !s.check([])?.is_sat() {
        return Err(EnumError::HardUnsat);
    }
    if s.check(0..n)?.is_sat() {
        return Ok(true);
    }
    loop {
        let r = s.solver.solve(&[s.block])?;
        if !r.is_sat() {
            return Ok(true);
        }
        if budget.max_results.is_some_and(|m| found.len() >= m) {
            return Ok(false);
        }
        let mut mss = s.satisfied_soft(&r);
        s.grow(&mut mss)?;
        let mcs = SoftSubset::new((0..n).filter(|&i| !mss[i]));
        debug_assert!(!mcs.is_empty());
        s.verify_mcs(&mcs)?;
        let blocking: Vec<Lit> = std::iter::once(!s.block)
            .chain(mcs.indices().iter().map(|&i| s.instance.soft()[i]))
            .collect();
        s.solver.add_clause(&blocking);
        found.push(mcs);
    }
}

/// Enumerates minimal unsatisfiable subsets as the minimal hitting sets of
/// the complete MCS family.
///
/// Refuses with [`EnumError::Incomplete`] when the MCS phase was cut short,
/// since hitting sets of a partial family are not MUSes in general.
pub fn enumerate_mus(
    instance: &PartialMaxSatInstance,
    budget: &EnumerationBudget,
) -> Result<Enumeration, EnumError> {
    let start = Instant::now();
    let mcs = enumerate_mcs(
        instance,
        &EnumerationBudget {
            max_results: None,
            timeout: budget.timeout,
        },
    )?;
    mus_from_mcs(instance, &mcs, budget, start)
}

/// Dualizes an already computed MCS enumeration; `start` anchors the budget.
pub fn mus_from_mcs(
    instance: &PartialMaxSatInstance,
    mcs: &Enumeration,
    budget: &EnumerationBudget,
    start: Instant,
) -> Result<Enumeration, EnumError> {
    if !mcs.complete {
        return Err(EnumError::Incomplete);
    }
    if mcs.subsets.is_empty() {
        return Ok(Enumeration {
            subsets: Vec::new(),
            complete: true,
        });
    }
    let deadline = budget.timeout.map(|t| start + t);
    let (muses, complete) = hitting_sets_within(&mcs.subsets, deadline, budget.max_results)?;
    let mut s = SoftSolver::new(instance, deadline);
    for m in &muses {
        s.verify_mus(m, &mcs.subsets)?;
    }
    Ok(Enumeration {
        subsets: muses,
        complete,
    })
}

/// One `tag: i j k` line per subset, soft positions 0-based.
pub fn format_subsets(tag: &str, subsets: &[SoftSubset]) -> String {
    let mut out = String::new();
    for s in subsets {
        out.push_str(tag);
        out.push(':');
        for i in s.indices() {
            out.push(' ');
            out.push_str(&i.to_string());
        }
        out.push('\n');
    }
    out
}
