//! SAT decisions and soft-clause subset enumeration.

mod enumerate;
mod hitting;
mod solver;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use enumerate::{enumerate_mcs, enumerate_mus, format_subsets, grow_mss, mus_from_mcs};
pub use hitting::{hitting_sets_within, minimal_hitting_sets};
pub use solver::{solve, Model, SatResult, Solver, Stats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SatError {
    #[error("time budget exhausted")]
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("hard clauses are unsatisfiable")]
    HardUnsat,
    #[error("seed is not satisfiable with the hard clauses")]
    SeedUnsat,
    #[error("time budget exhausted")]
    Timeout,
    #[error("correction-set enumeration is incomplete; hitting-set duality would be unsound")]
    Incomplete,
    #[error("enumeration result failed verification: {0}")]
    Verification(String),
}

impl From<SatError> for EnumError {
    fn from(e: SatError) -> Self {
        match e {
            SatError::Timeout => EnumError::Timeout,
        }
    }
}

/// A set of soft-clause positions, kept sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SoftSubset(Vec<usize>);

impl SoftSubset {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> SoftSubset {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        SoftSubset(v)
    }

    pub fn from_mask(mask: &[bool]) -> SoftSubset {
        SoftSubset(
            mask.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &SoftSubset) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }
}

impl fmt::Display for SoftSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for SoftSubset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SoftSubset::new(iter)
    }
}

/// Bounds for an enumeration run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_results: Option<usize>,
    pub timeout: Option<Duration>,
}

impl EnumerationBudget {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

    pub fn unlimited() -> EnumerationBudget {
        EnumerationBudget {
            max_results: None,
            timeout: None,
        }
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_results: None,
            timeout: Some(Self::DEFAULT_TIMEOUT),
        }
    }
}

/// Subsets found by an enumeration and whether the list is exhaustive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub subsets: Vec<SoftSubset>,
    pub complete: bool,
}
