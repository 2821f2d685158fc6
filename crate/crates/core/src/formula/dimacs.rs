//! DIMACS CNF and WCNF text formats.
//!
//! Output is LF-terminated, space separated, one clause per line ending in
//! `0`. WCNF export uses the classic `p wcnf V C TOP` header: hard clauses
//! carry weight `TOP = #soft + 1` and soft clauses weight 1.

use std::fmt::Write as _;

use super::cnf::{Clause, Cnf};
use super::lit::Lit;
use super::FormulaError;

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars(), cnf.len());
    for c in cnf.clauses() {
        write_lits(&mut out, c.lits());
    }
    out
}

pub fn read_dimacs(text: &str) -> Result<Cnf, FormulaError> {
    let mut header: Option<(u32, usize)> = None;
    let mut cnf = Cnf::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut seen = 0usize;
    let mut last_line = 0;
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        last_line = no;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(no, "duplicate header"));
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(parse_err(no, "expected `p cnf <vars> <clauses>`"));
            }
            let v = f[2]
                .parse()
                .map_err(|_| parse_err(no, "bad variable count"))?;
            let c = f[3]
                .parse()
                .map_err(|_| parse_err(no, "bad clause count"))?;
            header = Some((v, c));
            cnf.reserve_vars(v);
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| parse_err(no, "clause before header"))?;
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| parse_err(no, &format!("bad literal `{tok}`")))?;
            if v == 0 {
                cnf.add(current.drain(..));
                seen += 1;
                continue;
            }
            let lit = Lit::from_dimacs(v).ok_or_else(|| parse_err(no, "literal out of range"))?;
            if lit.var().index() > num_vars {
                return Err(parse_err(
                    no,
                    &format!("variable {} exceeds header", lit.var().index()),
                ));
            }
            current.push(lit);
        }
    }
    let (_, expected) = header.ok_or_else(|| parse_err(last_line.max(1), "missing header"))?;
    if !current.is_empty() {
        return Err(parse_err(last_line, "unterminated clause"));
    }
    if seen != expected {
        return Err(parse_err(
            last_line.max(1),
            &format!("header declares {expected} clauses, found {seen}"),
        ));
    }
    Ok(cnf)
}

/// Hard and soft clause sets read back from a WCNF file.
#[derive(Debug, Clone)]
pub struct Wcnf {
    pub hard: Cnf,
    pub soft: Vec<Clause>,
    pub top: u64,
}

pub fn write_wcnf(hard: &Cnf, soft: &[Clause]) -> String {
    let top = soft.len() as u64 + 1;
    let num_vars = soft
        .iter()
        .flat_map(|c| c.lits())
        .map(|l| l.var().index())
        .fold(hard.num_vars(), u32::max);
    let mut out = format!("p wcnf {} {} {}\n", num_vars, hard.len() + soft.len(), top);
    for c in hard.clauses() {
        write!(out, "{top} ").unwrap();
        write_lits(&mut out, c.lits());
    }
    for c in soft {
        out.push_str("1 ");
        write_lits(&mut out, c.lits());
    }
    out
}

pub fn read_wcnf(text: &str) -> Result<Wcnf, FormulaError> {
    let mut header: Option<(u32, usize, u64)> = None;
    let mut hard = Cnf::new();
    let mut soft = Vec::new();
    let mut last_line = 0;
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        last_line = no;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 || f[1] != "wcnf" {
                return Err(parse_err(no, "expected `p wcnf <vars> <clauses> <top>`"));
            }
            let v = f[2]
                .parse()
                .map_err(|_| parse_err(no, "bad variable count"))?;
            let c = f[3]
                .parse()
                .map_err(|_| parse_err(no, "bad clause count"))?;
            let t = f[4].parse().map_err(|_| parse_err(no, "bad top weight"))?;
            header = Some((v, c, t));
            hard.reserve_vars(v);
            continue;
        }
        let (num_vars, _, top) = header.ok_or_else(|| parse_err(no, "clause before header"))?;
        let mut toks = line.split_whitespace();
        let weight: u64 = toks
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| parse_err(no, "bad weight"))?;
        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in toks {
            let v: i64 = tok
                .parse()
                .map_err(|_| parse_err(no, &format!("bad literal `{tok}`")))?;
            if v == 0 {
                terminated = true;
                break;
            }
            let lit = Lit::from_dimacs(v).ok_or_else(|| parse_err(no, "literal out of range"))?;
            if lit.var().index() > num_vars {
                return Err(parse_err(no, "variable exceeds header"));
            }
            lits.push(lit);
        }
        if !terminated {
            return Err(parse_err(no, "clause must end with 0 on the same line"));
        }
        if weight >= top {
            hard.add(lits);
        } else if let Some(c) = Clause::new(lits) {
            soft.push(c);
        }
    }
    let (_, expected, top) = header.ok_or_else(|| parse_err(last_line.max(1), "missing header"))?;
    let _ = expected;
    Ok(Wcnf { hard, soft, top })
}

fn write_lits(out: &mut String, lits: &[Lit]) {
    for l in lits {
        write!(out, "{} ", l.to_dimacs()).unwrap();
    }
    out.push_str("0\n");
}

fn parse_err(line: usize, message: &str) -> FormulaError {
    FormulaError::Parse {
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;
    use proptest::prelude::*;

    fn l(v: i64) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    #[test]
    fn writes_single_clause() {
        let mut cnf = Cnf::new();
        cnf.add([l(1), l(-2)]);
        assert_eq!(write_dimacs(&cnf), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn writes_empty() {
        assert_eq!(write_dimacs(&Cnf::new()), "p cnf 0 0\n");
    }

    #[test]
    fn parse_error_carries_line() {
        let err = read_dimacs("c hi\np cnf 2 1\n1 x 0\n").unwrap_err();
        assert_eq!(
            err,
            FormulaError::Parse {
                line: 3,
                message: "bad literal `x`".into()
            }
        );
        assert!(matches!(
            read_dimacs("1 2 0\n"),
            Err(FormulaError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(FormulaError::Parse { .. })
        ));
        assert!(matches!(
            read_dimacs("p cnf 1 1\n1 2 0\n"),
            Err(FormulaError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn clauses_may_span_lines() {
        let cnf = read_dimacs("p cnf 3 2\n1 -2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(cnf.len(), 2);
        assert_eq!(cnf.clauses()[0].lits(), &[l(1), l(-2), l(3)]);
    }

    #[test]
    fn wcnf_format() {
        let mut hard = Cnf::new();
        hard.add([l(1), l(-2)]);
        let soft = vec![Clause::unit(l(1))];
        let text = write_wcnf(&hard, &soft);
        assert_eq!(text, "p wcnf 2 2 2\n2 1 -2 0\n1 1 0\n");
        let back = read_wcnf(&text).unwrap();
        assert_eq!(back.top, 2);
        assert_eq!(back.hard.len(), 1);
        assert_eq!(back.soft, soft);
    }

    fn arb_cnf() -> impl Strategy<Value = Cnf> {
        (1u32..12).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec((1..=n, any::<bool>()), 1..5), 0..20)
                .prop_map(move |cs| {
                    let mut cnf = Cnf::with_num_vars(n);
                    for c in cs {
                        cnf.add(c.into_iter().map(|(v, p)| Lit::new(Var::new(v), p)));
                    }
                    cnf
                })
        })
    }

    proptest! {
        #[test]
        fn dimacs_roundtrip(cnf in arb_cnf()) {
            let back = read_dimacs(&write_dimacs(&cnf)).unwrap();
            prop_assert!(back.same_clauses(&cnf));
        }

        #[test]
        fn wcnf_reparse_preserves_counts(hard in arb_cnf(), soft in prop::collection::vec((1u32..12, any::<bool>()), 0..10)) {
            let soft: Vec<Clause> = soft.into_iter().map(|(v, p)| Clause::unit(Lit::new(Var::new(v), p))).collect();
            let back = read_wcnf(&write_wcnf(&hard, &soft)).unwrap();
            prop_assert_eq!(back.hard.len(), hard.len());
            prop_assert_eq!(back.soft.len(), soft.len());
            prop_assert!(back.soft.iter().all(|c| c.len() == 1));
        }
    }
}
