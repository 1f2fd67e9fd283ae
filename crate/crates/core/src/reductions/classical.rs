//! Rewriting implicational formulas into classically equivalent formulas of
//! order at most three, through a conjunctive normal form of the premises.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::Formula;

/// A clause literal: variable name and polarity.
pub type Lit = (Arc<str>, bool);
pub type Clause = Vec<Lit>;

fn push_lit(c: &mut Clause, l: Lit) {
    if !c.contains(&l) {
        c.push(l);
    }
}

/// Clauses of `f`. `false` is the empty clause.
fn cnf(f: &Formula) -> Vec<Clause> {
    match f {
        Formula::Var(x) => vec![vec![(x.clone(), true)]],
        Formula::Falsum => vec![vec![]],
        Formula::Impl(a, b) => {
            let (cb, ca) = (cnf(b), cnf_neg(a));
            let mut out = Vec::with_capacity(cb.len() * ca.len());
            for x in &cb {
                for y in &ca {
                    let mut c = x.clone();
                    for l in y {
                        push_lit(&mut c, l.clone());
                    }
                    out.push(c);
                }
            }
            out
        }
        Formula::Conj(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        Formula::Disj(a, b) => cnf(&Formula::imp(
            Formula::negation((**a).clone()),
            (**b).clone(),
        )),
    }
}

/// Clauses of the negation of `f`.
fn cnf_neg(f: &Formula) -> Vec<Clause> {
    match f {
        Formula::Var(x) => vec![vec![(x.clone(), false)]],
        Formula::Falsum => vec![],
        Formula::Impl(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf_neg(b));
            out
        }
        Formula::Conj(a, b) => cnf(&Formula::imp(
            (**a).clone(),
            Formula::negation((**b).clone()),
        )),
        Formula::Disj(a, b) => {
            let mut out = cnf_neg(a);
            out.extend(cnf_neg(b));
            out
        }
    }
}

/// Replaces each clause by an order-two formula and concludes `p`. A clause
/// with a positive literal targets its first one; a purely negative clause
/// targets `p`.
pub fn rewrite_clauses(clauses: &[Clause], p: &Formula) -> Formula {
    let rewritten: Vec<Formula> = clauses
        .iter()
        .map(|c| {
            let neg = c.iter().filter(|l| !l.1).map(|l| Formula::Var(l.0.clone()));
            let mut pos = c.iter().filter(|l| l.1).map(|l| Formula::Var(l.0.clone()));
            match pos.next() {
                Some(s) => {
                    let others = pos.map(|r| Formula::imp(r, p.clone()));
                    Formula::imps(neg.chain(others).collect::<Vec<_>>(), s)
                }
                None => Formula::imps(neg.collect::<Vec<_>>(), p.clone()),
            }
        })
        .collect();
    Formula::imps(rewritten, p.clone())
}

/// A classically equivalent formula of order at most three. The input must
/// be implicational. Distribution is naive, so the output can be
/// exponentially larger.
pub fn classical_order3(phi: &Formula) -> Result<Formula> {
    if !phi.is_implicational() {
        return Err(Error::Fragment(
            "classical rewriting needs an implicational formula".into(),
        ));
    }
    let (args, target) = phi.unfold_impl();
    let clauses: Vec<Clause> = args.iter().flat_map(|a| cnf(a)).collect();
    Ok(rewrite_clauses(&clauses, target))
}

/// Classical truth value; variables missing from `v` are false.
pub fn eval(f: &Formula, v: &BTreeMap<Arc<str>, bool>) -> bool {
    match f {
        Formula::Var(x) => v.get(x).copied().unwrap_or(false),
        Formula::Falsum => false,
        Formula::Impl(a, b) => !eval(a, v) || eval(b, v),
        Formula::Conj(a, b) => eval(a, v) && eval(b, v),
        Formula::Disj(a, b) => eval(a, v) || eval(b, v),
    }
}

/// Whether `a` and `b` agree under every valuation of their variables.
pub fn truth_table_equivalent(a: &Formula, b: &Formula) -> bool {
    let mut vars = a.variables();
    for x in b.variables() {
        if !vars.contains(&x) {
            vars.push(x);
        }
    }
    assert!(vars.len() < 32, "truth table too large");
    (0..1u64 << vars.len()).all(|bits| {
        let v = vars
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), bits >> i & 1 == 1))
            .collect();
        eval(a, &v) == eval(b, &v)
    })
}
