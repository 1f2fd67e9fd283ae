//! Goal-directed proof search producing long-normal-form witnesses.
//!
//! Both the full engine and its implicational restriction run the same
//! search. A judgement is a set of hypotheses and a goal, all drawn from the
//! subformulas of the input, so it is represented as a bitset plus a goal id.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::formula::{targets, trace_paths, Context, Formula, Step, SubformulaTable};
use crate::term::{tidy_binders, Branch, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Provable(Term),
    Unprovable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Judgements examined, including memo hits.
    pub visited: usize,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofSearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl ProofSearchResult {
    pub fn is_provable(&self) -> bool {
        matches!(self.outcome, Outcome::Provable(_))
    }

    pub fn witness(&self) -> Option<&Term> {
        match &self.outcome {
            Outcome::Provable(t) => Some(t),
            Outcome::Unprovable => None,
        }
    }
}

/// Decides `ctx |- goal` in full intuitionistic propositional logic.
pub fn prove(ctx: &Context, goal: &Formula) -> ProofSearchResult {
    Search::new(ctx, goal).run()
}

/// Decides `ctx |- goal` for implicational formulas, yielding a simply
/// typed lambda term.
pub fn prove_iipc(ctx: &Context, goal: &Formula) -> Result<ProofSearchResult> {
    for f in ctx.formulas().chain(std::iter::once(goal)) {
        if !f.is_implicational() {
            return Err(Error::Fragment(format!("{f} is not implicational")));
        }
    }
    Ok(prove(ctx, goal))
}

/// One way of eliminating a hypothesis down to a target.
struct Elimination {
    target: usize,
    path: Vec<PathStep>,
    /// Sorted, deduplicated argument ids.
    args: Vec<usize>,
}

enum PathStep {
    Arg(usize),
    Fst,
    Snd,
}

type Key = (BitSet, usize);

const NO_HIT: usize = usize::MAX;

struct Search {
    table: SubformulaTable,
    names: HashMap<usize, String>,
    fresh_prefix: String,
    initial: Vec<usize>,
    goal: usize,
    eliminations: HashMap<usize, Rc<Vec<Elimination>>>,
    memo: HashMap<Key, Option<Rc<Term>>>,
    on_path: HashMap<Key, usize>,
    stats: SearchStats,
}

impl Search {
    fn new(ctx: &Context, goal: &Formula) -> Self {
        let mut table = SubformulaTable::default();
        let mut names = HashMap::new();
        let mut initial = Vec::new();
        for (name, f) in ctx.iter() {
            let id = table.intern(f);
            names.entry(id).or_insert_with(|| name.to_string());
            if !initial.contains(&id) {
                initial.push(id);
            }
        }
        let goal = table.intern(goal);
        let mut fresh_prefix = String::from("x");
        let clashes = |p: &str| {
            ctx.iter().any(|(n, _)| {
                n.strip_prefix(p).is_some_and(|rest| {
                    !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
                })
            })
        };
        while clashes(&fresh_prefix) {
            fresh_prefix.push('_');
        }
        Self {
            table,
            names,
            fresh_prefix,
            initial,
            goal,
            eliminations: HashMap::new(),
            memo: HashMap::new(),
            on_path: HashMap::new(),
            stats: SearchStats::default(),
        }
    }

    fn run(mut self) -> ProofSearchResult {
        let mut set = BitSet::new(self.table.len());
        for &h in &self.initial {
            set.insert(h);
        }
        let order = self.initial.clone();
        let (found, _) = self.solve(&order, &set, self.goal, 0);
        ProofSearchResult {
            outcome: match found {
                Some(t) => {
                    let avoid = self.names.values().cloned().collect();
                    Outcome::Provable(tidy_binders(&t, &avoid))
                }
                None => Outcome::Unprovable,
            },
            stats: self.stats,
        }
    }

    /// Hypothesis names depend only on the formula, so a memoized witness
    /// is valid in every context where it is looked up.
    fn name(&self, id: usize) -> String {
        match self.names.get(&id) {
            Some(n) => n.clone(),
            None => format!("{}{id}", self.fresh_prefix),
        }
    }

    fn formula(&self, id: usize) -> Formula {
        self.table.get(id).clone()
    }

    fn eliminations_of(&mut self, hyp: usize) -> Rc<Vec<Elimination>> {
        if let Some(e) = self.eliminations.get(&hyp) {
            return e.clone();
        }
        let psi = self.formula(hyp);
        let mut out = Vec::new();
        for alpha in targets(&psi) {
            let target = self.table.id(&alpha).expect("targets are subformulas");
            let mut seen: Vec<Vec<usize>> = Vec::new();
            for p in trace_paths(&alpha, &psi) {
                let path: Vec<PathStep> = p
                    .iter()
                    .map(|s| match s {
                        Step::Arg(a) => PathStep::Arg(self.table.id(a).expect("subformula")),
                        Step::Fst => PathStep::Fst,
                        Step::Snd => PathStep::Snd,
                    })
                    .collect();
                let mut args: Vec<usize> = path
                    .iter()
                    .filter_map(|s| match s {
                        PathStep::Arg(a) => Some(*a),
                        _ => None,
                    })
                    .collect();
                args.sort_unstable();
                args.dedup();
                if seen.contains(&args) {
                    continue;
                }
                seen.push(args.clone());
                out.push(Elimination { target, path, args });
            }
        }
        let out = Rc::new(out);
        self.eliminations.insert(hyp, out.clone());
        out
    }

    fn extend(&self, order: &[usize], set: &BitSet, h: usize) -> (Vec<usize>, BitSet) {
        let mut order = order.to_vec();
        let mut set = set.clone();
        if set.insert(h) {
            order.push(h);
        }
        (order, set)
    }

    /// Returns a witness, if any, and the shallowest on-path judgement that
    /// pruning ran into (`NO_HIT` if none).
    fn solve(
        &mut self,
        order: &[usize],
        set: &BitSet,
        goal: usize,
        depth: usize,
    ) -> (Option<Rc<Term>>, usize) {
        self.stats.visited += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let key = (set.clone(), goal);
        if let Some(r) = self.memo.get(&key) {
            return (r.clone(), NO_HIT);
        }
        if let Some(&d) = self.on_path.get(&key) {
            return (None, d);
        }
        self.on_path.insert(key.clone(), depth);
        let (found, hit) = self.expand(order, set, goal, depth);
        self.on_path.remove(&key);
        if found.is_some() || hit >= depth {
            self.memo.insert(key, found.clone());
        }
        (found, hit)
    }

    fn expand(
        &mut self,
        order: &[usize],
        set: &BitSet,
        goal: usize,
        depth: usize,
    ) -> (Option<Rc<Term>>, usize) {
        let goal_f = self.formula(goal);
        match &goal_f {
            Formula::Conj(a, b) => {
                let (a, b) = (self.id(a), self.id(b));
                let (ta, h1) = self.solve(order, set, a, depth + 1);
                let Some(ta) = ta else { return (None, h1) };
                let (tb, h2) = self.solve(order, set, b, depth + 1);
                let hit = h1.min(h2);
                match tb {
                    Some(tb) => (Some(Rc::new(Term::pair((*ta).clone(), (*tb).clone()))), hit),
                    None => (None, hit),
                }
            }
            Formula::Impl(a, b) => {
                let (a_id, b_id) = (self.id(a), self.id(b));
                let (order2, set2) = self.extend(order, set, a_id);
                let (body, hit) = self.solve(&order2, &set2, b_id, depth + 1);
                let t = body.map(|body| {
                    Rc::new(Term::lam(&self.name(a_id), (**a).clone(), (*body).clone()))
                });
                (t, hit)
            }
            _ => self.eliminate(order, set, goal, &goal_f, depth),
        }
    }

    fn id(&self, f: &Formula) -> usize {
        self.table.id(f).expect("subformula of the input")
    }

    /// Atom or disjunction goals: introduction for disjunctions, then
    /// elimination of some hypothesis down to a usable target.
    fn eliminate(
        &mut self,
        order: &[usize],
        set: &BitSet,
        goal: usize,
        goal_f: &Formula,
        depth: usize,
    ) -> (Option<Rc<Term>>, usize) {
        let mut hit = NO_HIT;
        if let Formula::Disj(l, r) = goal_f {
            for (side, left) in [(l, true), (r, false)] {
                let sid = self.id(side);
                let (t, h) = self.solve(order, set, sid, depth + 1);
                hit = hit.min(h);
                if let Some(t) = t {
                    let t = (*t).clone();
                    let inj = if left {
                        Term::inl(t, goal_f.clone())
                    } else {
                        Term::inr(t, goal_f.clone())
                    };
                    return (Some(Rc::new(inj)), hit);
                }
            }
        }
        let falsum = self.table.id(&Formula::Falsum);
        for &hyp in order {
            let elims = self.eliminations_of(hyp);
            for e in elims.iter() {
                let target_f = self.formula(e.target);
                let usable = (e.target == goal && goal_f.is_atom())
                    || Some(e.target) == falsum
                    || target_f.is_disj();
                if !usable {
                    continue;
                }
                let mut proofs: HashMap<usize, Rc<Term>> = HashMap::new();
                let mut ok = true;
                for &a in &e.args {
                    let (t, h) = self.solve(order, set, a, depth + 1);
                    hit = hit.min(h);
                    match t {
                        Some(t) => {
                            proofs.insert(a, t);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let spine = self.spine(hyp, &e.path, &proofs);
                if e.target == goal && goal_f.is_atom() {
                    return (Some(Rc::new(spine)), hit);
                }
                if Some(e.target) == falsum {
                    return (Some(Rc::new(Term::absurd(spine, goal_f.clone()))), hit);
                }
                let Formula::Disj(b, c) = &target_f else {
                    unreachable!()
                };
                let (b_id, c_id) = (self.id(b), self.id(c));
                let (ob, sb) = self.extend(order, set, b_id);
                let (left, h) = self.solve(&ob, &sb, goal, depth + 1);
                hit = hit.min(h);
                let Some(left) = left else { continue };
                let (oc, sc) = self.extend(order, set, c_id);
                let (right, h) = self.solve(&oc, &sc, goal, depth + 1);
                hit = hit.min(h);
                let Some(right) = right else { continue };
                let t = Term::case(
                    spine,
                    Branch::new(&self.name(b_id), (**b).clone(), (*left).clone()),
                    Branch::new(&self.name(c_id), (**c).clone(), (*right).clone()),
                );
                return (Some(Rc::new(t)), hit);
            }
        }
        (None, hit)
    }

    fn spine(&self, hyp: usize, path: &[PathStep], proofs: &HashMap<usize, Rc<Term>>) -> Term {
        let mut t = Term::Var(self.name(hyp));
        for s in path {
            t = match s {
                PathStep::Arg(a) => Term::app(t, (*proofs[a]).clone()),
                PathStep::Fst => Term::fst(t),
                PathStep::Snd => Term::snd(t),
            };
        }
        t
    }
}

/// All closed long-normal inhabitants of an implicational `goal` with at
/// most `max_size` nodes. Binders are named `x1, x2, ...` by depth, so
/// alpha-equal results are syntactically equal.
pub fn enumerate_normal_inhabitants(goal: &Formula, max_size: usize) -> Result<Vec<Term>> {
    if !goal.is_implicational() {
        return Err(Error::Fragment(format!("{goal} is not implicational")));
    }
    let mut out = inhabitants(&mut Vec::new(), goal, max_size);
    let mut seen = HashSet::new();
    out.retain(|t| seen.insert(t.clone()));
    Ok(out)
}

fn inhabitants(env: &mut Vec<(String, Formula)>, goal: &Formula, budget: usize) -> Vec<Term> {
    if budget == 0 {
        return Vec::new();
    }
    if let Formula::Impl(a, b) = goal {
        let x = format!("x{}", env.len() + 1);
        env.push((x.clone(), (**a).clone()));
        let bodies = inhabitants(env, b, budget - 1);
        env.pop();
        return bodies
            .into_iter()
            .map(|body| Term::lam(&x, (**a).clone(), body))
            .collect();
    }
    let mut out = Vec::new();
    for i in 0..env.len() {
        let (x, ty) = env[i].clone();
        let (args, target) = ty.unfold_impl();
        if target != goal {
            continue;
        }
        let args: Vec<Formula> = args.into_iter().cloned().collect();
        // One node for the head and one per application.
        let Some(rest) = budget.checked_sub(1 + args.len()) else {
            continue;
        };
        spines(env, Term::Var(x), &args, rest, &mut out);
    }
    out
}

fn spines(
    env: &mut Vec<(String, Formula)>,
    head: Term,
    args: &[Formula],
    budget: usize,
    out: &mut Vec<Term>,
) {
    let Some((first, rest)) = args.split_first() else {
        out.push(head);
        return;
    };
    // Each remaining argument needs at least one node.
    let Some(own) = budget.checked_sub(rest.len()) else {
        return;
    };
    for a in inhabitants(env, first, own) {
        let used = a.size();
        spines(env, Term::app(head.clone(), a), rest, budget - used, out);
    }
}
