use super::cnf::{Cnf, VarPool};
use super::expr::Formula;
use super::lit::Lit;

/// Tseitin transformation with full biconditional gate definitions.
///
/// Every `And`/`Or` node with two or more children gets one fresh variable
/// equivalent to it; literals pass through and negation flips the child's
/// output literal. Constants get a fresh variable fixed by a unit clause.
/// The returned literal represents `f`: asserting it yields a CNF
/// equisatisfiable with `f`, and each model of `f` extends uniquely.
pub fn tseitin(f: &Formula, pool: &mut VarPool) -> (Cnf, Lit) {
    let mut cnf = Cnf::new();
    let out = define(f, pool, &mut cnf);
    cnf.reserve_vars(pool.num_vars());
    (cnf, out)
}

fn define(f: &Formula, pool: &mut VarPool, cnf: &mut Cnf) -> Lit {
    match f {
        Formula::Lit(l) => *l,
        Formula::Not(c) => !define(c, pool, cnf),
        Formula::Const(b) => constant(*b, pool, cnf),
        Formula::And(cs) | Formula::Or(cs) if cs.is_empty() => {
            constant(matches!(f, Formula::And(_)), pool, cnf)
        }
        Formula::And(cs) | Formula::Or(cs) if cs.len() == 1 => define(&cs[0], pool, cnf),
        Formula::And(cs) => {
            let ins: Vec<Lit> = cs.iter().map(|c| define(c, pool, cnf)).collect();
            let a = pool.fresh().positive();
            for &l in &ins {
                cnf.add([!a, l]);
            }
            cnf.add(std::iter::once(a).chain(ins.iter().map(|&l| !l)));
            a
        }
        Formula::Or(cs) => {
            let ins: Vec<Lit> = cs.iter().map(|c| define(c, pool, cnf)).collect();
            let a = pool.fresh().positive();
            for &l in &ins {
                cnf.add([a, !l]);
            }
            cnf.add(std::iter::once(!a).chain(ins.iter().copied()));
            a
        }
    }
}

fn constant(value: bool, pool: &mut VarPool, cnf: &mut Cnf) -> Lit {
    let a = pool.fresh().positive();
    cnf.add([a]);
    if value {
        a
    } else {
        !a
    }
}
