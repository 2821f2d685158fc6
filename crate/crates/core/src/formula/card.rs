use super::cnf::{Cnf, VarPool};
use super::lit::Lit;
use super::FormulaError;

#[derive(Clone, Copy)]
enum Node {
    True,
    False,
    Lit(Lit),
}

/// Encodes `out <=> (number of true lits >= t)` with a sequential counter.
///
/// Counter variable `s[i][j]` is defined as "at least `j` of the first `i`
/// literals are true" through the biconditional
/// `s[i][j] <=> s[i-1][j] | (lits[i] & s[i-1][j-1])`, so every counter
/// variable, and `out = s[m][t]`, is a function of the inputs.
pub fn encode_card_geq(
    lits: &[Lit],
    t: usize,
    out: Lit,
    pool: &mut VarPool,
) -> Result<Cnf, FormulaError> {
    let m = lits.len();
    if t < 1 || t > m {
        return Err(FormulaError::InvalidThreshold {
            threshold: t,
            count: m,
        });
    }
    let mut cnf = Cnf::new();
    // prev[j] = s[i-1][j] for j in 0..=t
    let mut prev: Vec<Node> = (0..=t)
        .map(|j| if j == 0 { Node::True } else { Node::False })
        .collect();
    for (i, &x) in lits.iter().enumerate() {
        let i = i + 1;
        let mut cur = vec![Node::True; t + 1];
        for j in 1..=t {
            if j > i {
                cur[j] = Node::False;
                continue;
            }
            let s = if i == m && j == t {
                out
            } else {
                pool.fresh().positive()
            };
            let keep = prev[j];
            let carry = prev[j - 1];
            // keep -> s
            add(&mut cnf, &[neg(keep), Node::Lit(s)]);
            // x & carry -> s
            add(&mut cnf, &[Node::Lit(!x), neg(carry), Node::Lit(s)]);
            // s -> keep | x
            add(&mut cnf, &[Node::Lit(!s), keep, Node::Lit(x)]);
            // s -> keep | carry
            add(&mut cnf, &[Node::Lit(!s), keep, carry]);
            cur[j] = Node::Lit(s);
        }
        prev = cur;
    }
    cnf.reserve_vars(pool.num_vars().max(out.var().index()));
    Ok(cnf)
}

fn neg(n: Node) -> Node {
    match n {
        Node::True => Node::False,
        Node::False => Node::True,
        Node::Lit(l) => Node::Lit(!l),
    }
}

fn add(cnf: &mut Cnf, nodes: &[Node]) {
    let mut lits = Vec::with_capacity(nodes.len());
    for n in nodes {
        match *n {
            Node::True => return,
            Node::False => {}
            Node::Lit(l) => lits.push(l),
        }
    }
    cnf.add(lits);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;

    #[test]
    fn single_literal_is_equivalence() {
        let mut pool = VarPool::with_inputs(&["y1", "y"]).unwrap();
        let cnf = encode_card_geq(
            &[Var::new(1).positive()],
            1,
            Var::new(2).positive(),
            &mut pool,
        )
        .unwrap();
        let mut got: Vec<Vec<i64>> = cnf
            .clauses()
            .iter()
            .map(|c| {
                let mut v: Vec<i64> = c.lits().iter().map(|l| l.to_dimacs()).collect();
                v.sort();
                v
            })
            .collect();
        got.sort();
        assert_eq!(got, vec![vec![-2, 1], vec![-1, 2]]);
    }

    #[test]
    fn threshold_out_of_range() {
        let mut pool = VarPool::with_inputs(&["a", "y"]).unwrap();
        let lits = [Var::new(1).positive()];
        for t in [0, 2] {
            assert!(matches!(
                encode_card_geq(&lits, t, Var::new(2).positive(), &mut pool),
                Err(FormulaError::InvalidThreshold { .. })
            ));
        }
    }
}
