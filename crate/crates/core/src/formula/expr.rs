use std::collections::BTreeSet;
use std::fmt;

use super::lit::{Lit, Var};
use super::FormulaError;

/// Propositional formula over [`Lit`] leaves.
///
/// An `And` with no children is true and an `Or` with no children is false;
/// the smart constructors never build either.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Lit(Lit),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn lit(l: Lit) -> Formula {
        Formula::Lit(l)
    }

    pub fn var(v: Var) -> Formula {
        Formula::Lit(v.positive())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; collapses the empty and single-child cases.
    pub fn and(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::Const(true),
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction; collapses the empty and single-child cases.
    pub fn or(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::Const(false),
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    /// Disjunction of literals, i.e. a clause.
    pub fn clause(lits: impl IntoIterator<Item = Lit>) -> Formula {
        Formula::or(lits.into_iter().map(Formula::Lit).collect())
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::Const(b) => *b,
            Formula::Lit(l) => l.eval(
                a.get(l.var())
                    .ok_or(FormulaError::MissingAssignment(l.var()))?,
            ),
            Formula::Not(f) => !f.evaluate(a)?,
            Formula::And(cs) => {
                // Evaluate every child so a missing variable is always reported.
                let mut acc = true;
                for c in cs {
                    acc &= c.evaluate(a)?;
                }
                acc
            }
            Formula::Or(cs) => {
                let mut acc = false;
                for c in cs {
                    acc |= c.evaluate(a)?;
                }
                acc
            }
        })
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Lit(l) => {
                out.insert(l.var());
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, cs: &[Formula], op: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
        match self {
            Formula::Const(true) => write!(f, "T"),
            Formula::Const(false) => write!(f, "F"),
            Formula::Lit(l) if l.is_positive() => write!(f, "{}", l.var()),
            Formula::Lit(l) => write!(f, "~{}", l.var()),
            Formula::Not(c) => write!(f, "~{c}"),
            Formula::And(cs) => join(f, cs, "&"),
            Formula::Or(cs) => join(f, cs, "|"),
        }
    }
}

/// Partial map from variables to truth values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    /// Total assignment of variables `1..=bits.len()`.
    pub fn from_bits(bits: &[bool]) -> Assignment {
        let mut values = Vec::with_capacity(bits.len() + 1);
        values.push(None);
        values.extend(bits.iter().map(|&b| Some(b)));
        Assignment { values }
    }

    pub fn set(&mut self, v: Var, value: bool) {
        let i = v.index() as usize;
        if self.values.len() <= i {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(value);
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values.get(v.index() as usize).copied().flatten()
    }
}

impl FromIterator<(Var, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, bool)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (v, b) in iter {
            a.set(v, b);
        }
        a
    }
}
