use std::collections::{HashMap, HashSet};

use super::lit::{Lit, Var};
use super::FormulaError;

/// A disjunction of distinct literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Builds a clause, merging duplicate literals (first occurrence wins the
    /// position). Returns `None` for tautologies.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Option<Clause> {
        let mut out: Vec<Lit> = Vec::new();
        for l in lits {
            if out.contains(&!l) {
                return None;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Some(Clause { lits: out })
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_satisfied_by(&self, value: impl Fn(Var) -> bool) -> bool {
        self.lits.iter().any(|l| l.eval(value(l.var())))
    }

    fn sorted_key(&self) -> Vec<Lit> {
        let mut k = self.lits.clone();
        k.sort_unstable();
        k
    }
}

/// A conjunction of clauses over variables `1..=num_vars`.
///
/// Tautologies and duplicate clauses are dropped as they are added.
#[derive(Debug, Clone, Default)]
pub struct Cnf {
    clauses: Vec<Clause>,
    num_vars: u32,
    index: HashSet<Vec<Lit>>,
}

impl Cnf {
    pub fn new() -> Cnf {
        Cnf::default()
    }

    pub fn with_num_vars(num_vars: u32) -> Cnf {
        Cnf {
            num_vars,
            ..Cnf::default()
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Raises the declared variable count; never lowers it.
    pub fn reserve_vars(&mut self, num_vars: u32) {
        self.num_vars = self.num_vars.max(num_vars);
    }

    /// Adds a clause given as literals; returns whether a clause was stored.
    pub fn add(&mut self, lits: impl IntoIterator<Item = Lit>) -> bool {
        match Clause::new(lits) {
            Some(c) => self.push(c),
            None => false,
        }
    }

    pub fn push(&mut self, clause: Clause) -> bool {
        if !self.index.insert(clause.sorted_key()) {
            return false;
        }
        if let Some(m) = clause.lits.iter().map(|l| l.var().index()).max() {
            self.num_vars = self.num_vars.max(m);
        }
        self.clauses.push(clause);
        true
    }

    pub fn extend(&mut self, other: &Cnf) {
        self.reserve_vars(other.num_vars);
        for c in &other.clauses {
            self.push(c.clone());
        }
    }

    /// Whether `value` satisfies every clause.
    pub fn is_satisfied_by(&self, value: impl Fn(Var) -> bool) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(&value))
    }

    /// Equality of the clause sets, ignoring clause and literal order.
    pub fn same_clauses(&self, other: &Cnf) -> bool {
        self.num_vars == other.num_vars && self.index == other.index
    }
}

impl PartialEq for Cnf {
    fn eq(&self, other: &Cnf) -> bool {
        self.num_vars == other.num_vars && self.clauses == other.clauses
    }
}

impl Eq for Cnf {}

/// Allocates variables. Named input variables come first (`1..=n`), then
/// fresh auxiliaries.
#[derive(Debug, Clone, Default)]
pub struct VarPool {
    issued: u32,
    names: Vec<String>,
    by_name: HashMap<String, Var>,
}

impl VarPool {
    pub fn new() -> VarPool {
        VarPool::default()
    }

    pub fn with_inputs<S: AsRef<str>>(names: &[S]) -> Result<VarPool, FormulaError> {
        let mut pool = VarPool::new();
        for name in names {
            let name = name.as_ref().to_string();
            let var = Var::new(pool.issued + 1);
            if pool.by_name.insert(name.clone(), var).is_some() {
                return Err(FormulaError::DuplicateName(name));
            }
            pool.issued += 1;
            pool.names.push(name);
        }
        Ok(pool)
    }

    pub fn fresh(&mut self) -> Var {
        self.issued += 1;
        Var::new(self.issued)
    }

    pub fn num_vars(&self) -> u32 {
        self.issued
    }

    pub fn num_inputs(&self) -> usize {
        self.names.len()
    }

    /// Variable of input feature `i` (0-based).
    pub fn input(&self, i: usize) -> Option<Var> {
        (i < self.names.len()).then(|| Var::new(i as u32 + 1))
    }

    pub fn var_of(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    pub fn name_of(&self, var: Var) -> Option<&str> {
        self.names.get(var.index() as usize - 1).map(String::as_str)
    }

    pub fn input_names(&self) -> &[String] {
        &self.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(v: i64) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    #[test]
    fn tautology_dropped() {
        assert!(Clause::new([l(1), l(-1)]).is_none());
        let mut cnf = Cnf::new();
        assert!(!cnf.add([l(2), l(1), l(-2)]));
        assert!(cnf.is_empty());
    }

    #[test]
    fn duplicate_literals_merged() {
        let c = Clause::new([l(1), l(-2), l(1)]).unwrap();
        assert_eq!(c.lits(), &[l(1), l(-2)]);
    }

    #[test]
    fn duplicate_clauses_dropped() {
        let mut cnf = Cnf::new();
        assert!(cnf.add([l(1), l(-2)]));
        assert!(!cnf.add([l(-2), l(1)]));
        assert_eq!(cnf.len(), 1);
        assert_eq!(cnf.num_vars(), 2);
    }

    #[test]
    fn pool_layout() {
        let mut pool = VarPool::with_inputs(&["a", "b"]).unwrap();
        assert_eq!(pool.var_of("b"), Some(Var::new(2)));
        assert_eq!(pool.fresh(), Var::new(3));
        assert_eq!(pool.name_of(Var::new(1)), Some("a"));
        assert_eq!(pool.name_of(Var::new(3)), None);
        assert!(matches!(
            VarPool::with_inputs(&["a", "a"]),
            Err(FormulaError::DuplicateName(_))
        ));
    }
}
