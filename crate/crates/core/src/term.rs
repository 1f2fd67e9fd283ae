//! Church-style proof terms for intuitionistic propositional logic:
//! typing, substitution, reduction (beta and permutative), long normal
//! forms and beta-eta comparison for the implicational fragment.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{tokenize, Context, Formula, FormulaParser, Tok};

/// A binder of one branch of a disjunction elimination.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    pub var: String,
    pub ty: Formula,
    pub body: Box<Term>,
}

impl Branch {
    pub fn new(var: &str, ty: Formula, body: Term) -> Self {
        Self {
            var: var.to_string(),
            ty,
            body: Box::new(body),
        }
    }
}

/// A proof term.
///
/// Injections carry the whole disjunction they build and the falsum
/// eliminator carries its conclusion, so every well-typed term has exactly
/// one type, computed from the annotations alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Abs(String, Formula, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    Inj1(Box<Term>, Formula),
    Inj2(Box<Term>, Formula),
    Case(Box<Term>, Branch, Branch),
    Absurd(Box<Term>, Formula),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn lam(x: &str, ty: Formula, body: Term) -> Term {
        Term::Abs(x.to_string(), ty, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(m: Term) -> Term {
        Term::Proj1(Box::new(m))
    }

    pub fn snd(m: Term) -> Term {
        Term::Proj2(Box::new(m))
    }

    pub fn inl(m: Term, disj: Formula) -> Term {
        Term::Inj1(Box::new(m), disj)
    }

    pub fn inr(m: Term, disj: Formula) -> Term {
        Term::Inj2(Box::new(m), disj)
    }

    pub fn case(m: Term, left: Branch, right: Branch) -> Term {
        Term::Case(Box::new(m), left, right)
    }

    pub fn absurd(m: Term, ty: Formula) -> Term {
        Term::Absurd(Box::new(m), ty)
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, _, b)
            | Term::Proj1(b)
            | Term::Proj2(b)
            | Term::Inj1(b, _)
            | Term::Inj2(b, _)
            | Term::Absurd(b, _) => 1 + b.size(),
            Term::App(a, b) | Term::Pair(a, b) => 1 + a.size() + b.size(),
            Term::Case(m, l, r) => 1 + m.size() + l.body.size() + r.body.size(),
        }
    }

    /// Only variables, abstractions and applications.
    pub fn is_implicational(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, ty, b) => ty.is_implicational() && b.is_implicational(),
            Term::App(a, b) => a.is_implicational() && b.is_implicational(),
            _ => false,
        }
    }
}

// Typing.

type Env = Vec<(String, Formula)>;

fn env_of(ctx: &Context) -> Env {
    ctx.iter()
        .map(|(n, f)| (n.to_string(), f.clone()))
        .collect()
}

fn lookup<'e>(env: &'e [(String, Formula)], x: &str) -> Option<&'e Formula> {
    env.iter().rev().find(|(n, _)| n == x).map(|(_, f)| f)
}

fn type_err<T>(t: &Term, msg: impl Into<String>) -> Result<T> {
    let mut at = t.to_string();
    if at.len() > 60 {
        at.truncate(57);
        at.push_str("...");
    }
    Err(Error::Type {
        at: format!("`{at}`"),
        msg: msg.into(),
    })
}

fn infer(env: &mut Env, t: &Term) -> Result<Formula> {
    match t {
        Term::Var(x) => lookup(env, x)
            .cloned()
            .ok_or_else(|| Error::Unbound(x.clone())),
        Term::Abs(x, ty, body) => {
            env.push((x.clone(), ty.clone()));
            let b = infer(env, body);
            env.pop();
            Ok(Formula::imp(ty.clone(), b?))
        }
        Term::App(f, a) => {
            let tf = infer(env, f)?;
            let ta = infer(env, a)?;
            match tf {
                Formula::Impl(dom, cod) if *dom == ta => Ok((*cod).clone()),
                Formula::Impl(dom, _) => {
                    type_err(t, format!("argument has type {ta}, expected {dom}"))
                }
                other => type_err(t, format!("applying a proof of {other}")),
            }
        }
        Term::Pair(a, b) => Ok(Formula::and(infer(env, a)?, infer(env, b)?)),
        Term::Proj1(m) | Term::Proj2(m) => match infer(env, m)? {
            Formula::Conj(l, r) => Ok(if matches!(t, Term::Proj1(_)) {
                (*l).clone()
            } else {
                (*r).clone()
            }),
            other => type_err(t, format!("projection from {other}")),
        },
        Term::Inj1(m, ann) | Term::Inj2(m, ann) => {
            let tm = infer(env, m)?;
            match ann {
                Formula::Disj(l, r) => {
                    let side = if matches!(t, Term::Inj1(..)) { l } else { r };
                    if **side == tm {
                        Ok(ann.clone())
                    } else {
                        type_err(t, format!("injected proof of {tm} into {ann}"))
                    }
                }
                _ => type_err(t, format!("injection annotated with non-disjunction {ann}")),
            }
        }
        Term::Case(m, l, r) => {
            let tm = infer(env, m)?;
            let Formula::Disj(a, b) = &tm else {
                return type_err(t, format!("case analysis on {tm}"));
            };
            if **a != l.ty || **b != r.ty {
                return type_err(t, format!("binders {} / {} do not match {tm}", l.ty, r.ty));
            }
            env.push((l.var.clone(), l.ty.clone()));
            let tl = infer(env, &l.body);
            env.pop();
            env.push((r.var.clone(), r.ty.clone()));
            let tr = infer(env, &r.body);
            env.pop();
            let (tl, tr) = (tl?, tr?);
            if tl != tr {
                return type_err(t, format!("branches prove {tl} and {tr}"));
            }
            Ok(tl)
        }
        Term::Absurd(m, ty) => match infer(env, m)? {
            Formula::Falsum => Ok(ty.clone()),
            other => type_err(t, format!("ex falso from {other}")),
        },
    }
}

/// The type of `t` in `ctx`.
pub fn typecheck(ctx: &Context, t: &Term) -> Result<Formula> {
    infer(&mut env_of(ctx), t)
}

// Variables and substitution.

pub fn free_vars(t: &Term) -> BTreeSet<String> {
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, _, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            Term::App(a, b) | Term::Pair(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Term::Proj1(m)
            | Term::Proj2(m)
            | Term::Inj1(m, _)
            | Term::Inj2(m, _)
            | Term::Absurd(m, _) => go(m, bound, out),
            Term::Case(m, l, r) => {
                go(m, bound, out);
                for br in [l, r] {
                    bound.push(br.var.clone());
                    go(&br.body, bound, out);
                    bound.pop();
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Renames a binder when it would capture a free variable of `n`.
fn rebind(var: &str, body: &Term, x: &str, n_fv: &BTreeSet<String>) -> (String, Term) {
    if n_fv.contains(var) && free_vars(body).contains(x) {
        let mut avoid = free_vars(body);
        avoid.extend(n_fv.iter().cloned());
        avoid.insert(x.to_string());
        let fresh = fresh_name(var, &avoid);
        let renamed = subst_term(body, var, &Term::Var(fresh.clone()));
        (fresh, renamed)
    } else {
        (var.to_string(), body.clone())
    }
}

/// Capture-avoiding substitution `m[x := n]`.
pub fn subst_term(m: &Term, x: &str, n: &Term) -> Term {
    subst_with(m, x, n, &free_vars(n))
}

fn subst_with(m: &Term, x: &str, n: &Term, n_fv: &BTreeSet<String>) -> Term {
    let go = |t: &Term| Box::new(subst_with(t, x, n, n_fv));
    match m {
        Term::Var(y) if y == x => n.clone(),
        Term::Var(_) => m.clone(),
        Term::Abs(y, _, _) if y == x => m.clone(),
        Term::Abs(y, ty, body) => {
            let (y, body) = rebind(y, body, x, n_fv);
            Term::Abs(y, ty.clone(), Box::new(subst_with(&body, x, n, n_fv)))
        }
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Pair(a, b) => Term::Pair(go(a), go(b)),
        Term::Proj1(a) => Term::Proj1(go(a)),
        Term::Proj2(a) => Term::Proj2(go(a)),
        Term::Inj1(a, f) => Term::Inj1(go(a), f.clone()),
        Term::Inj2(a, f) => Term::Inj2(go(a), f.clone()),
        Term::Absurd(a, f) => Term::Absurd(go(a), f.clone()),
        Term::Case(s, l, r) => {
            let branch = |br: &Branch| -> Branch {
                if br.var == x {
                    return br.clone();
                }
                let (v, body) = rebind(&br.var, &br.body, x, n_fv);
                Branch {
                    var: v,
                    ty: br.ty.clone(),
                    body: Box::new(subst_with(&body, x, n, n_fv)),
                }
            };
            Term::Case(go(s), branch(l), branch(r))
        }
    }
}

// Alpha-equivalence through a nameless representation.

#[derive(PartialEq, Eq, Debug)]
enum Nameless {
    Bound(usize),
    Free(String),
    Abs(Formula, Box<Nameless>),
    App(Box<Nameless>, Box<Nameless>),
    Pair(Box<Nameless>, Box<Nameless>),
    Proj1(Box<Nameless>),
    Proj2(Box<Nameless>),
    Inj1(Box<Nameless>, Formula),
    Inj2(Box<Nameless>, Formula),
    Case(
        Box<Nameless>,
        Formula,
        Box<Nameless>,
        Formula,
        Box<Nameless>,
    ),
    Absurd(Box<Nameless>, Formula),
}

fn nameless(t: &Term, scope: &mut Vec<String>) -> Nameless {
    let mut go = |t: &Term| Box::new(nameless(t, scope));
    match t {
        Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
            Some(i) => Nameless::Bound(i),
            None => Nameless::Free(x.clone()),
        },
        Term::Abs(x, ty, b) => {
            scope.push(x.clone());
            let b = nameless(b, scope);
            scope.pop();
            Nameless::Abs(ty.clone(), Box::new(b))
        }
        Term::App(a, b) => Nameless::App(go(a), go(b)),
        Term::Pair(a, b) => Nameless::Pair(go(a), go(b)),
        Term::Proj1(a) => Nameless::Proj1(go(a)),
        Term::Proj2(a) => Nameless::Proj2(go(a)),
        Term::Inj1(a, f) => Nameless::Inj1(go(a), f.clone()),
        Term::Inj2(a, f) => Nameless::Inj2(go(a), f.clone()),
        Term::Absurd(a, f) => Nameless::Absurd(go(a), f.clone()),
        Term::Case(s, l, r) => {
            let s = go(s);
            let mut branch = |br: &Branch| {
                scope.push(br.var.clone());
                let b = nameless(&br.body, scope);
                scope.pop();
                Box::new(b)
            };
            let lb = branch(l);
            let rb = branch(r);
            Nameless::Case(s, l.ty.clone(), lb, r.ty.clone(), rb)
        }
    }
}

/// Renames every binder to `x`, `x1`, `x2`, ... in order of occurrence,
/// skipping free variables and the names in `avoid`.
pub fn tidy_binders(t: &Term, avoid: &BTreeSet<String>) -> Term {
    struct Namer<'a> {
        taken: BTreeSet<String>,
        avoid: &'a BTreeSet<String>,
        next: usize,
    }
    impl Namer<'_> {
        fn fresh(&mut self) -> String {
            loop {
                let n = match self.next {
                    0 => "x".to_string(),
                    k => format!("x{k}"),
                };
                self.next += 1;
                if !self.taken.contains(&n) && !self.avoid.contains(&n) {
                    return n;
                }
            }
        }
    }
    fn go(t: &Term, env: &mut Vec<(String, String)>, nm: &mut Namer) -> Term {
        let bind = |x: &str, body: &Term, env: &mut Vec<(String, String)>, nm: &mut Namer| {
            let y = nm.fresh();
            env.push((x.to_string(), y.clone()));
            let b = go(body, env, nm);
            env.pop();
            (y, b)
        };
        match t {
            Term::Var(x) => Term::Var(
                env.iter()
                    .rev()
                    .find(|(o, _)| o == x)
                    .map_or_else(|| x.clone(), |(_, n)| n.clone()),
            ),
            Term::Abs(x, ty, b) => {
                let (y, b) = bind(x, b, env, nm);
                Term::lam(&y, ty.clone(), b)
            }
            Term::App(a, b) => Term::app(go(a, env, nm), go(b, env, nm)),
            Term::Pair(a, b) => Term::pair(go(a, env, nm), go(b, env, nm)),
            Term::Proj1(m) => Term::fst(go(m, env, nm)),
            Term::Proj2(m) => Term::snd(go(m, env, nm)),
            Term::Inj1(m, f) => Term::inl(go(m, env, nm), f.clone()),
            Term::Inj2(m, f) => Term::inr(go(m, env, nm), f.clone()),
            Term::Absurd(m, f) => Term::absurd(go(m, env, nm), f.clone()),
            Term::Case(m, l, r) => {
                let m = go(m, env, nm);
                let (ly, lb) = bind(&l.var, &l.body, env, nm);
                let (ry, rb) = bind(&r.var, &r.body, env, nm);
                Term::case(
                    m,
                    Branch::new(&ly, l.ty.clone(), lb),
                    Branch::new(&ry, r.ty.clone(), rb),
                )
            }
        }
    }
    let mut nm = Namer {
        taken: free_vars(t),
        avoid,
        next: 0,
    };
    go(t, &mut Vec::new(), &mut nm)
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    nameless(a, &mut Vec::new()) == nameless(b, &mut Vec::new())
}

// Reduction.

/// Which redex `reduce_step` contracts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
    RightmostInnermost,
}

/// Pushes the eliminator `wrap` into both branches of a case analysis,
/// renaming binders that would capture free variables of the eliminator.
fn push_into_branches(
    scrut: &Term,
    l: &Branch,
    r: &Branch,
    elim_fv: &BTreeSet<String>,
    wrap: &dyn Fn(Term) -> Term,
) -> Term {
    let move_in = |br: &Branch| -> Branch {
        let (var, body) = if elim_fv.contains(&br.var) {
            let mut avoid = free_vars(&br.body);
            avoid.extend(elim_fv.iter().cloned());
            let fresh = fresh_name(&br.var, &avoid);
            let body = subst_term(&br.body, &br.var, &Term::Var(fresh.clone()));
            (fresh, body)
        } else {
            (br.var.clone(), (*br.body).clone())
        };
        Branch {
            var,
            ty: br.ty.clone(),
            body: Box::new(wrap(body)),
        }
    };
    Term::Case(Box::new(scrut.clone()), move_in(l), move_in(r))
}

/// Contracts `t` itself if it is a redex.
fn contract(t: &Term, env: &mut Env) -> Option<Term> {
    match t {
        Term::App(f, n) => match &**f {
            Term::Abs(x, _, m) => Some(subst_term(m, x, n)),
            Term::Case(s, l, r) => {
                let fv = free_vars(n);
                Some(push_into_branches(s, l, r, &fv, &|b| {
                    Term::App(Box::new(b), n.clone())
                }))
            }
            Term::Absurd(m, Formula::Impl(_, cod)) => {
                Some(Term::Absurd(m.clone(), (**cod).clone()))
            }
            _ => None,
        },
        Term::Proj1(p) | Term::Proj2(p) => {
            let first = matches!(t, Term::Proj1(_));
            match &**p {
                Term::Pair(a, b) => Some(if first { (**a).clone() } else { (**b).clone() }),
                Term::Case(s, l, r) => Some(push_into_branches(s, l, r, &BTreeSet::new(), &|b| {
                    if first {
                        Term::fst(b)
                    } else {
                        Term::snd(b)
                    }
                })),
                Term::Absurd(m, Formula::Conj(a, b)) => Some(Term::Absurd(
                    m.clone(),
                    if first { (**a).clone() } else { (**b).clone() },
                )),
                _ => None,
            }
        }
        Term::Case(s, l, r) => match &**s {
            Term::Inj1(m, _) => Some(subst_term(&l.body, &l.var, m)),
            Term::Inj2(m, _) => Some(subst_term(&r.body, &r.var, m)),
            Term::Case(s2, l2, r2) => {
                let mut fv = BTreeSet::new();
                for br in [l, r] {
                    let mut f = free_vars(&br.body);
                    f.remove(&br.var);
                    fv.extend(f);
                }
                Some(push_into_branches(s2, l2, r2, &fv, &|b| {
                    Term::Case(Box::new(b), l.clone(), r.clone())
                }))
            }
            Term::Absurd(m, _) => {
                // The new conclusion is the type of the case expression.
                env.push((l.var.clone(), l.ty.clone()));
                let ty = infer(env, &l.body);
                env.pop();
                ty.ok().map(|ty| Term::Absurd(m.clone(), ty))
            }
            _ => None,
        },
        Term::Absurd(inner, ty) => match &**inner {
            Term::Absurd(m, _) => Some(Term::Absurd(m.clone(), ty.clone())),
            Term::Case(s, l, r) => {
                let ty = ty.clone();
                Some(push_into_branches(s, l, r, &BTreeSet::new(), &move |b| {
                    Term::Absurd(Box::new(b), ty.clone())
                }))
            }
            _ => None,
        },
        _ => None,
    }
}

fn rebuild_child(t: &Term, idx: usize, new: Term) -> Term {
    let mut t = t.clone();
    let slot: &mut Term = match (&mut t, idx) {
        (Term::Abs(_, _, b), 0)
        | (Term::Proj1(b), 0)
        | (Term::Proj2(b), 0)
        | (Term::Inj1(b, _), 0)
        | (Term::Inj2(b, _), 0)
        | (Term::Absurd(b, _), 0)
        | (Term::App(b, _), 0)
        | (Term::Pair(b, _), 0)
        | (Term::Case(b, _, _), 0) => b,
        (Term::App(_, b), 1) | (Term::Pair(_, b), 1) => b,
        (Term::Case(_, l, _), 1) => &mut l.body,
        (Term::Case(_, _, r), 2) => &mut r.body,
        _ => unreachable!("no child {idx}"),
    };
    *slot = new;
    t
}

/// Children of `t` with the binder each one is under.
fn children(t: &Term) -> Vec<(&Term, Option<(&String, &Formula)>)> {
    match t {
        Term::Var(_) => vec![],
        Term::Abs(x, ty, b) => vec![(b, Some((x, ty)))],
        Term::Proj1(b)
        | Term::Proj2(b)
        | Term::Inj1(b, _)
        | Term::Inj2(b, _)
        | Term::Absurd(b, _) => {
            vec![(b, None)]
        }
        Term::App(a, b) | Term::Pair(a, b) => vec![(a, None), (b, None)],
        Term::Case(s, l, r) => vec![
            (s, None),
            (&l.body, Some((&l.var, &l.ty))),
            (&r.body, Some((&r.var, &r.ty))),
        ],
    }
}

fn step_in(t: &Term, env: &mut Env, strategy: Strategy) -> Option<Term> {
    let outermost = strategy == Strategy::LeftmostOutermost;
    if outermost {
        if let Some(r) = contract(t, env) {
            return Some(r);
        }
    }
    let kids = children(t);
    let order: Vec<usize> = if outermost {
        (0..kids.len()).collect()
    } else {
        (0..kids.len()).rev().collect()
    };
    for i in order {
        let (child, binder) = kids[i];
        if let Some((x, ty)) = binder {
            env.push((x.clone(), ty.clone()));
        }
        let reduced = step_in(child, env, strategy);
        if binder.is_some() {
            env.pop();
        }
        if let Some(new) = reduced {
            return Some(rebuild_child(t, i, new));
        }
    }
    if outermost {
        None
    } else {
        contract(t, env)
    }
}

/// One leftmost-outermost contraction of a beta or permutation redex, or
/// `None` when `t` is normal. The context types free variables, which the
/// permutation of a case analysis over an ex-falso needs.
pub fn reduce_step(ctx: &Context, t: &Term) -> Option<Term> {
    step_in(t, &mut env_of(ctx), Strategy::LeftmostOutermost)
}

pub fn reduce_step_with(ctx: &Context, t: &Term, strategy: Strategy) -> Option<Term> {
    step_in(t, &mut env_of(ctx), strategy)
}

pub const DEFAULT_STEP_LIMIT: usize = 100_000;

/// Normal form and the number of steps taken, failing if `t` is ill-typed or
/// the step limit is exceeded.
pub fn normalize_with(
    ctx: &Context,
    t: &Term,
    strategy: Strategy,
    max_steps: usize,
) -> Result<(Term, usize)> {
    typecheck(ctx, t)?;
    let mut env = env_of(ctx);
    let mut cur = t.clone();
    for steps in 0..=max_steps {
        match step_in(&cur, &mut env, strategy) {
            Some(next) => cur = next,
            None => return Ok((cur, steps)),
        }
    }
    Err(Error::Invalid(format!(
        "normalization exceeded {max_steps} steps"
    )))
}

/// Leftmost-outermost normal form.
pub fn normalize(ctx: &Context, t: &Term) -> Result<Term> {
    normalize_with(ctx, t, Strategy::LeftmostOutermost, DEFAULT_STEP_LIMIT).map(|(t, _)| t)
}

// Long normal forms.

enum Elim<'t> {
    Arg(&'t Term),
    Fst,
    Snd,
    Case(&'t Branch, &'t Branch),
    Absurd(&'t Formula),
}

fn spine(t: &Term) -> (&Term, Vec<Elim<'_>>) {
    let mut elims = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::App(f, a) => {
                elims.push(Elim::Arg(a));
                cur = f;
            }
            Term::Proj1(m) => {
                elims.push(Elim::Fst);
                cur = m;
            }
            Term::Proj2(m) => {
                elims.push(Elim::Snd);
                cur = m;
            }
            Term::Case(m, l, r) => {
                elims.push(Elim::Case(l, r));
                cur = m;
            }
            Term::Absurd(m, ty) => {
                elims.push(Elim::Absurd(ty));
                cur = m;
            }
            _ => break,
        }
    }
    elims.reverse();
    (cur, elims)
}

fn lnf(env: &mut Env, t: &Term, goal: &Formula) -> bool {
    match t {
        Term::Abs(x, ty, body) => match goal {
            Formula::Impl(a, b) if **a == *ty => {
                env.push((x.clone(), ty.clone()));
                let ok = lnf(env, body, b);
                env.pop();
                ok
            }
            _ => false,
        },
        Term::Pair(m, n) => match goal {
            Formula::Conj(a, b) => lnf(env, m, a) && lnf(env, n, b),
            _ => false,
        },
        Term::Inj1(m, ann) | Term::Inj2(m, ann) => match goal {
            Formula::Disj(a, b) if ann == goal => {
                let side = if matches!(t, Term::Inj1(..)) { a } else { b };
                lnf(env, m, side)
            }
            _ => false,
        },
        _ => {
            let (head, elims) = spine(t);
            let Term::Var(x) = head else {
                return false;
            };
            let Some(mut ty) = lookup(env, x).cloned() else {
                return false;
            };
            let last = elims.len().saturating_sub(1);
            for (i, e) in elims.iter().enumerate() {
                match (e, &ty) {
                    (Elim::Arg(a), Formula::Impl(dom, cod)) => {
                        if !lnf(env, a, dom) {
                            return false;
                        }
                        ty = (**cod).clone();
                    }
                    (Elim::Fst, Formula::Conj(l, _)) => ty = (**l).clone(),
                    (Elim::Snd, Formula::Conj(_, r)) => ty = (**r).clone(),
                    (Elim::Case(l, r), Formula::Disj(a, b)) => {
                        if i != last || !(goal.is_atom() || goal.is_disj()) {
                            return false;
                        }
                        if l.ty != **a || r.ty != **b {
                            return false;
                        }
                        for br in [l, r] {
                            env.push((br.var.clone(), br.ty.clone()));
                            let ok = lnf(env, &br.body, goal);
                            env.pop();
                            if !ok {
                                return false;
                            }
                        }
                        return true;
                    }
                    (Elim::Absurd(target), Formula::Falsum) => {
                        return i == last && *target == goal && (goal.is_atom() || goal.is_disj());
                    }
                    _ => return false,
                }
            }
            ty == *goal && goal.is_atom()
        }
    }
}

/// Whether `t` is a long normal form of type `goal` in `ctx`.
pub fn is_long_normal(ctx: &Context, t: &Term, goal: &Formula) -> bool {
    lnf(&mut env_of(ctx), t, goal)
}

// Beta-eta equality for implicational terms.

fn eta_reduce(t: &Term) -> Term {
    match t {
        Term::Abs(x, ty, body) => {
            let body = eta_reduce(body);
            if let Term::App(f, a) = &body {
                if matches!(&**a, Term::Var(y) if y == x) && !free_vars(f).contains(x) {
                    return (**f).clone();
                }
            }
            Term::Abs(x.clone(), ty.clone(), Box::new(body))
        }
        Term::App(f, a) => Term::app(eta_reduce(f), eta_reduce(a)),
        _ => t.clone(),
    }
}

fn beta_eta_normal(t: &Term) -> Result<Term> {
    let mut env = Env::new();
    let mut cur = t.clone();
    for _ in 0..DEFAULT_STEP_LIMIT {
        match step_in(&cur, &mut env, Strategy::LeftmostOutermost) {
            Some(next) => cur = next,
            None => return Ok(eta_reduce(&cur)),
        }
    }
    Err(Error::Invalid(
        "beta normalization did not terminate".into(),
    ))
}

/// Whether two implicational terms have alpha-equal beta-eta normal forms.
pub fn beta_eta_equal(m: &Term, n: &Term) -> Result<bool> {
    for t in [m, n] {
        if !t.is_implicational() {
            return Err(Error::Fragment(format!(
                "beta-eta comparison needs implicational terms, got {t}"
            )));
        }
    }
    Ok(alpha_eq(&beta_eta_normal(m)?, &beta_eta_normal(n)?))
}

// Concrete syntax.

const KEYWORDS: [&str; 5] = ["case", "of", "in1", "in2", "absurd"];

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, 0, f)
    }
}

/// Levels: 0 anywhere, 1 function position, 2 argument position.
fn write_term(t: &Term, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let needs_parens = match t {
        Term::Var(_) | Term::Pair(..) | Term::Proj1(_) | Term::Proj2(_) => false,
        Term::App(..) => level >= 2,
        _ => level >= 1,
    };
    if needs_parens {
        write!(f, "(")?;
    }
    match t {
        Term::Var(x) => write!(f, "{x}")?,
        Term::Abs(x, ty, body) => {
            write!(f, "\\{x}:{ty}. ")?;
            write_term(body, 0, f)?;
        }
        Term::App(a, b) => {
            write_term(a, 1, f)?;
            write!(f, " ")?;
            write_term(b, 2, f)?;
        }
        Term::Pair(a, b) => {
            write!(f, "<")?;
            write_term(a, 0, f)?;
            write!(f, ", ")?;
            write_term(b, 0, f)?;
            write!(f, ">")?;
        }
        Term::Proj1(m) | Term::Proj2(m) => {
            write_term(m, 2, f)?;
            write!(
                f,
                "{}",
                if matches!(t, Term::Proj1(_)) {
                    ".1"
                } else {
                    ".2"
                }
            )?;
        }
        Term::Inj1(m, ann) | Term::Inj2(m, ann) => {
            write!(
                f,
                "{} ",
                if matches!(t, Term::Inj1(..)) {
                    "in1"
                } else {
                    "in2"
                }
            )?;
            write_term(m, 2, f)?;
            write!(f, " : {ann}")?;
        }
        Term::Absurd(m, ty) => {
            write!(f, "absurd ")?;
            write_term(m, 2, f)?;
            write!(f, " : {ty}")?;
        }
        Term::Case(m, l, r) => {
            write!(f, "case ")?;
            write_term(m, 1, f)?;
            write!(f, " of {}:{} => ", l.var, l.ty)?;
            write_term(&l.body, 1, f)?;
            write!(f, " | {}:{} => ", r.var, r.ty)?;
            write_term(&r.body, 0, f)?;
        }
    }
    if needs_parens {
        write!(f, ")")?;
    }
    Ok(())
}

struct TermParser<'t> {
    p: FormulaParser<'t>,
}

impl TermParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.p.peek()
    }

    fn is_punct(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(p)) if *p == s)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(n)) if n == k)
    }

    fn expect_punct(&mut self, s: &str) -> Result<()> {
        if self.is_punct(s) {
            self.p.pos += 1;
            Ok(())
        } else {
            self.p.err(format!("expected '{s}'"))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<()> {
        if self.is_keyword(k) {
            self.p.pos += 1;
            Ok(())
        } else {
            self.p.err(format!("expected '{k}'"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(n)) if !KEYWORDS.contains(&n.as_str()) => {
                self.p.pos += 1;
                Ok(n)
            }
            _ => self.p.err("expected a variable"),
        }
    }

    fn binder(&mut self) -> Result<(String, Formula)> {
        let x = self.ident()?;
        self.expect_punct(":")?;
        let ty = self.p.formula()?;
        Ok((x, ty))
    }

    fn term(&mut self) -> Result<Term> {
        if self.is_punct("\\") {
            self.p.pos += 1;
            let (x, ty) = self.binder()?;
            self.expect_punct(".")?;
            let body = self.term()?;
            return Ok(Term::lam(&x, ty, body));
        }
        if self.is_keyword("case") {
            self.p.pos += 1;
            let m = self.term()?;
            self.expect_keyword("of")?;
            let (x, tx) = self.binder()?;
            self.expect_punct("=>")?;
            let l = self.term()?;
            self.expect_punct("|")?;
            let (y, ty) = self.binder()?;
            self.expect_punct("=>")?;
            let r = self.term()?;
            return Ok(Term::case(
                m,
                Branch::new(&x, tx, l),
                Branch::new(&y, ty, r),
            ));
        }
        let mut acc = self.postfix()?;
        while self.starts_postfix() {
            let arg = self.postfix()?;
            acc = Term::app(acc, arg);
        }
        Ok(acc)
    }

    fn starts_postfix(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(n)) => n != "of" && n != "case",
            Some(Tok::LParen) => true,
            Some(Tok::Punct("<")) => true,
            _ => false,
        }
    }

    fn postfix(&mut self) -> Result<Term> {
        let mut t = self.atom()?;
        loop {
            if self.is_punct(".1") {
                self.p.pos += 1;
                t = Term::fst(t);
            } else if self.is_punct(".2") {
                self.p.pos += 1;
                t = Term::snd(t);
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.p.pos += 1;
                let t = self.term()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.p.err("expected ')'");
                }
                self.p.pos += 1;
                Ok(t)
            }
            Some(Tok::Punct("<")) => {
                self.p.pos += 1;
                let a = self.term()?;
                self.expect_punct(",")?;
                let b = self.term()?;
                self.expect_punct(">")?;
                Ok(Term::pair(a, b))
            }
            Some(Tok::Ident(k)) if k == "in1" || k == "in2" || k == "absurd" => {
                self.p.pos += 1;
                let m = self.postfix()?;
                self.expect_punct(":")?;
                let ty = self.p.formula()?;
                Ok(match k.as_str() {
                    "in1" => Term::inl(m, ty),
                    "in2" => Term::inr(m, ty),
                    _ => Term::absurd(m, ty),
                })
            }
            Some(Tok::Ident(_)) => Ok(Term::Var(self.ident()?)),
            Some(t) => self.p.err(format!("expected a term, found {t:?}")),
            None => self.p.err("unexpected end of input"),
        }
    }
}

/// Parses `\x:F. t`, application by juxtaposition, `<t, u>`, `t.1`, `t.2`,
/// `in1 t : F`, `in2 t : F`, `case t of x:F => u | y:G => v` and
/// `absurd t : F`.
pub fn parse_term(text: &str) -> Result<Term> {
    let toks = tokenize(text)?;
    let mut tp = TermParser {
        p: FormulaParser {
            toks: &toks,
            pos: 0,
            end: text.len(),
        },
    };
    let t = tp.term()?;
    if tp.p.pos != toks.len() {
        return tp.p.err("trailing input");
    }
    Ok(t)
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_term(s)
    }
}
