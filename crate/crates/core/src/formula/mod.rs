//! Propositional formulas, CNF, and the encodings built on them.

mod card;
mod cnf;
mod dimacs;
mod expr;
mod lit;
mod tseitin;

pub use card::encode_card_geq;
pub use cnf::{Clause, Cnf, VarPool};
pub use dimacs::{read_dimacs, read_wcnf, write_dimacs, write_wcnf, Wcnf};
pub use expr::{Assignment, Formula};
pub use lit::{Lit, Var};
pub use tseitin::tseitin;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("variable {0} is not assigned")]
    MissingAssignment(Var),
    #[error("threshold {threshold} outside 1..={count}")]
    InvalidThreshold { threshold: usize, count: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
