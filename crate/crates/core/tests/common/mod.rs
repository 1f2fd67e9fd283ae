//! Corpora and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use orderthree::automata::{Configuration, Instruction, MonotonicAutomaton};
use orderthree::reductions::cnf::{Cnf3, Literal};
use orderthree::term::Branch;
use orderthree::{Context, Formula, Term};
use rand::seq::SliceRandom;
use rand::Rng;

/// Every formula with at most `max_size` nodes over the given atoms and
/// the connectives `->`, `/\`, `\/`.
pub fn formulas_up_to(max_size: usize, atoms: &[Formula]) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = atoms.to_vec();
    }
    for n in 2..=max_size {
        let mut out = Vec::new();
        for left in 1..n - 1 {
            let right = n - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    out.push(Formula::imp(a.clone(), b.clone()));
                    out.push(Formula::and(a.clone(), b.clone()));
                    out.push(Formula::or(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().collect()
}

/// The exhaustive corpus: size at most 7 over `p`, `q` and `false`.
pub fn exhaustive_corpus() -> Vec<Formula> {
    formulas_up_to(7, &[Formula::var("p"), Formula::var("q"), Formula::Falsum])
}

/// A random formula of at most `max_size` nodes over `vars` and `false`.
pub fn random_formula<R: Rng>(rng: &mut R, max_size: usize, vars: &[&str]) -> Formula {
    if max_size < 3 || rng.gen_bool(0.15) {
        return match rng.gen_range(0..=vars.len()) {
            0 => Formula::Falsum,
            i => Formula::var(vars[i - 1]),
        };
    }
    let budget = max_size - 1;
    let left = rng.gen_range(1..budget);
    let a = random_formula(rng, left, vars);
    let b = random_formula(rng, budget - a.size(), vars);
    match rng.gen_range(0..4) {
        0 | 1 => Formula::imp(a, b),
        2 => Formula::and(a, b),
        _ => Formula::or(a, b),
    }
}

/// 3-CNF instances over at most three variables with at most three
/// clauses, one per class under reordering literals, reordering clauses and
/// renaming variables.
pub fn cnf_corpus() -> Vec<Cnf3> {
    let names = ["p", "q", "r"];
    let lits: Vec<(usize, bool)> = (0..3).flat_map(|v| [(v, true), (v, false)]).collect();
    let mut clauses: Vec<[(usize, bool); 3]> = Vec::new();
    for i in 0..lits.len() {
        for j in i..lits.len() {
            for k in j..lits.len() {
                clauses.push([lits[i], lits[j], lits[k]]);
            }
        }
    }
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let canonical = |cs: &[[(usize, bool); 3]]| {
        perms
            .iter()
            .map(|p| {
                let mut out: Vec<Vec<(usize, bool)>> = cs
                    .iter()
                    .map(|c| {
                        let mut c: Vec<_> = c.iter().map(|&(v, b)| (p[v], b)).collect();
                        c.sort();
                        c
                    })
                    .collect();
                out.sort();
                out
            })
            .min()
            .expect("nonempty")
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let n = clauses.len();
    let mut push = |cs: &[[(usize, bool); 3]]| {
        if seen.insert(canonical(cs)) {
            out.push(Cnf3::new(
                cs.iter()
                    .map(|c| {
                        c.map(|(v, b)| Literal {
                            var: names[v].to_string(),
                            positive: b,
                        })
                    })
                    .collect(),
            ));
        }
    };
    for i in 0..n {
        push(&[clauses[i]]);
        for j in i..n {
            push(&[clauses[i], clauses[j]]);
            for k in j..n {
                push(&[clauses[i], clauses[j], clauses[k]]);
            }
        }
    }
    out
}

/// Random well-typed terms over `a: p`, `b: q`, `z: false`, rich in
/// redexes of every kind.
pub struct TermGen<'r, R: Rng> {
    pub rng: &'r mut R,
    fresh: usize,
}

fn p() -> Formula {
    Formula::var("p")
}

fn q() -> Formula {
    Formula::var("q")
}

pub fn term_context() -> Context {
    Context::new()
        .with("a", p())
        .and_then(|c| c.with("b", q()))
        .and_then(|c| c.with("z", Formula::Falsum))
        .expect("distinct names")
}

impl<'r, R: Rng> TermGen<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        TermGen { rng, fresh: 0 }
    }

    fn name(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    pub fn small_type(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return [p(), q()].choose(self.rng).expect("nonempty").clone();
        }
        let a = self.small_type(depth - 1);
        let b = self.small_type(depth - 1);
        match self.rng.gen_range(0..3) {
            0 => Formula::imp(a, b),
            1 => Formula::and(a, b),
            _ => Formula::or(a, b),
        }
    }

    /// A term of type `ty` using the variables in `env` (name, type).
    pub fn term(&mut self, env: &[(String, Formula)], ty: &Formula, depth: usize) -> Term {
        let matching: Vec<&String> = env
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(n, _)| n)
            .collect();
        if depth == 0 || self.rng.gen_bool(0.1) {
            if let Some(x) = matching.choose(self.rng) {
                return Term::var(x);
            }
            return self.intro(env, ty, 0);
        }
        match self.rng.gen_range(0..7) {
            0 => self.intro(env, ty, depth - 1),
            1 => {
                let a = self.small_type(1);
                let x = self.name();
                let mut inner = env.to_vec();
                inner.push((x.clone(), a.clone()));
                let body = self.term(&inner, ty, depth - 1);
                let arg = self.term(env, &a, depth - 1);
                Term::app(Term::lam(&x, a, body), arg)
            }
            2 => {
                let b = self.small_type(1);
                let left = self.rng.gen_bool(0.5);
                let pair = if self.rng.gen_bool(0.5) {
                    let (x, y) = (self.term(env, ty, depth - 1), self.term(env, &b, depth - 1));
                    if left {
                        Term::pair(x, y)
                    } else {
                        Term::pair(y, x)
                    }
                } else if left {
                    self.term(env, &Formula::and(ty.clone(), b), depth - 1)
                } else {
                    self.term(env, &Formula::and(b, ty.clone()), depth - 1)
                };
                if left {
                    Term::fst(pair)
                } else {
                    Term::snd(pair)
                }
            }
            3 => {
                let (a, b) = (self.small_type(1), self.small_type(1));
                let disj = Formula::or(a.clone(), b.clone());
                let scrutinee = if self.rng.gen_bool(0.5) {
                    self.intro(env, &disj, depth - 1)
                } else {
                    self.term(env, &disj, depth - 1)
                };
                let (x, y) = (self.name(), self.name());
                let mut left = env.to_vec();
                left.push((x.clone(), a.clone()));
                let mut right = env.to_vec();
                right.push((y.clone(), b.clone()));
                let l = self.term(&left, ty, depth - 1);
                let r = self.term(&right, ty, depth - 1);
                Term::case(scrutinee, Branch::new(&x, a, l), Branch::new(&y, b, r))
            }
            4 => Term::absurd(self.term(env, &Formula::Falsum, depth - 1), ty.clone()),
            5 => {
                let a = self.small_type(1);
                let f = self.term(env, &Formula::imp(a.clone(), ty.clone()), depth - 1);
                let x = self.term(env, &a, depth - 1);
                Term::app(f, x)
            }
            _ => match matching.choose(self.rng) {
                Some(x) => Term::var(x),
                None => self.intro(env, ty, depth - 1),
            },
        }
    }

    fn intro(&mut self, env: &[(String, Formula)], ty: &Formula, depth: usize) -> Term {
        match ty {
            Formula::Var(_) | Formula::Falsum => {
                let names: Vec<&String> = env
                    .iter()
                    .filter(|(_, t)| t == ty)
                    .map(|(n, _)| n)
                    .collect();
                match names.choose(self.rng) {
                    Some(x) => Term::var(x),
                    None => Term::absurd(Term::var("z"), ty.clone()),
                }
            }
            Formula::Impl(a, b) => {
                let x = self.name();
                let mut inner = env.to_vec();
                inner.push((x.clone(), (**a).clone()));
                Term::lam(&x, (**a).clone(), self.term(&inner, b, depth))
            }
            Formula::Conj(a, b) => Term::pair(self.term(env, a, depth), self.term(env, b, depth)),
            Formula::Disj(a, b) => {
                if self.rng.gen_bool(0.5) {
                    Term::inl(self.term(env, a, depth), ty.clone())
                } else {
                    Term::inr(self.term(env, b, depth), ty.clone())
                }
            }
        }
    }

    /// A closed-over-`term_context` term and its type.
    pub fn sample(&mut self, depth: usize) -> (Term, Formula) {
        let env: Vec<(String, Formula)> = vec![
            ("a".into(), p()),
            ("b".into(), q()),
            ("z".into(), Formula::Falsum),
        ];
        let ty = self.small_type(2);
        let t = self.term(&env, &ty, depth);
        (t, ty)
    }
}

/// A random automaton with `2..=max_states` states and `1..=max_registers`
/// registers; the last state is final.
pub fn random_automaton<R: Rng>(
    rng: &mut R,
    max_states: usize,
    max_registers: usize,
) -> (MonotonicAutomaton, Configuration) {
    let nq = rng.gen_range(2..=max_states);
    let nr = rng.gen_range(1..=max_registers);
    let states: Vec<String> = (0..nq).map(|i| format!("q{i}")).collect();
    let registers: Vec<String> = (0..nr).map(|i| format!("r{i}")).collect();
    let subset = |rng: &mut R, p: f64| -> Vec<&str> {
        registers
            .iter()
            .filter(|_| rng.gen_bool(p))
            .map(String::as_str)
            .collect()
    };
    let mut instructions = Vec::new();
    for _ in 0..rng.gen_range(1..=3 * nq) {
        let at = &states[rng.gen_range(0..nq)];
        if rng.gen_bool(0.3) {
            let l = &states[rng.gen_range(0..nq)];
            let r = &states[rng.gen_range(0..nq)];
            instructions.push(Instruction::split(at, l, r));
        } else {
            let check = subset(rng, 0.2);
            let set = subset(rng, 0.2);
            let goto = &states[rng.gen_range(0..nq)];
            instructions.push(Instruction::check_set(at, check, set, goto));
        }
    }
    let init = Configuration::new(&states[0], subset(rng, 0.3));
    let a = MonotonicAutomaton {
        final_state: states[nq - 1].clone(),
        states,
        registers,
        instructions,
    };
    (a, init)
}

/// Least fixed point of the acceptance clauses over all state and store
/// pairs.
pub fn lfp_accepting(a: &MonotonicAutomaton) -> HashSet<(String, u64)> {
    let mask = |rs: &BTreeSet<String>| store_mask(a, rs);
    let mut acc: HashSet<(String, u64)> = HashSet::new();
    loop {
        let mut changed = false;
        for q in &a.states {
            for s in 0..1u64 << a.registers.len() {
                if acc.contains(&(q.clone(), s)) {
                    continue;
                }
                let good = *q == a.final_state
                    || a.instructions.iter().any(|i| match i {
                        Instruction::CheckSet {
                            at,
                            check,
                            set,
                            goto,
                        } => {
                            at == q
                                && mask(check) & !s == 0
                                && acc.contains(&(goto.clone(), s | mask(set)))
                        }
                        Instruction::Split { at, left, right } => {
                            at == q
                                && acc.contains(&(left.clone(), s))
                                && acc.contains(&(right.clone(), s))
                        }
                    });
                if good {
                    acc.insert((q.clone(), s));
                    changed = true;
                }
            }
        }
        if !changed {
            return acc;
        }
    }
}

/// The store as a bit mask over the register list.
pub fn store_mask(a: &MonotonicAutomaton, store: &BTreeSet<String>) -> u64 {
    store.iter().fold(0u64, |m, r| {
        m | 1
            << a.registers
                .iter()
                .position(|x| x == r)
                .expect("declared register")
    })
}

/// Formulas over `p`, `q`, `r` and `false` with all three connectives.
pub fn formula_strategy() -> impl proptest::strategy::Strategy<Value = Formula> {
    use proptest::prelude::*;
    let leaf = prop_oneof![
        Just(Formula::var("p")),
        Just(Formula::var("q")),
        Just(Formula::var("r")),
        Just(Formula::Falsum),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            1 => (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
}

/// Implicational formulas over `p`, `q`, `r`.
pub fn implicational_strategy() -> impl proptest::strategy::Strategy<Value = Formula> {
    use proptest::prelude::*;
    let leaf = prop_oneof![
        Just(Formula::var("p")),
        Just(Formula::var("q")),
        Just(Formula::var("r")),
    ];
    leaf.prop_recursive(4, 20, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b))
    })
}

/// Every implicational formula with at most `max_size` nodes over `atoms`.
pub fn implicational_up_to(max_size: usize, atoms: &[Formula]) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = atoms.to_vec();
    }
    for n in 2..=max_size {
        let mut out = Vec::new();
        for left in 1..n - 1 {
            for a in &by_size[left] {
                for b in &by_size[n - 1 - left] {
                    out.push(Formula::imp(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().collect()
}
