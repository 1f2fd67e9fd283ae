//! Finite Kripke models: forcing, exhaustive search for small
//! countermodels, and the depth-two search for the order-two-plus fragment.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{Context, Formula};
use crate::fragment::{is_order_two_plus, literal_spine};
use crate::prover::prove;

/// Most states a model may have; states are bits of a `u64`.
pub const MAX_STATES: usize = 64;

/// Above this many states, `countermodel_search` stops removing isomorphic
/// copies of posets, which only costs time.
const CANONICAL_LIMIT: usize = 7;

/// A finite poset of states `c0, c1, ...` with a monotone valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    /// `up[c]`: the states above `c`, including `c`.
    up: Vec<u64>,
    valuation: Vec<BTreeSet<Arc<str>>>,
}

impl KripkeModel {
    /// Builds a model from generating pairs `c <= d` and the atoms forced at
    /// each state. The order is closed reflexively and transitively; a
    /// cycle or a non-monotone valuation is an error.
    pub fn new<S: AsRef<str>>(order: &[(usize, usize)], valuation: Vec<Vec<S>>) -> Result<Self> {
        let n = valuation.len();
        if n == 0 || n > MAX_STATES {
            return Err(Error::Invalid(format!(
                "a model needs 1 to {MAX_STATES} states"
            )));
        }
        let mut up: Vec<u64> = (0..n).map(|c| 1u64 << c).collect();
        for &(c, d) in order {
            if c >= n || d >= n {
                return Err(Error::Invalid(format!("no state c{}", c.max(d))));
            }
            up[c] |= 1 << d;
        }
        loop {
            let before = up.clone();
            for c in 0..n {
                for d in bits(before[c]) {
                    up[c] |= before[d];
                }
            }
            if up == before {
                break;
            }
        }
        let valuation = valuation
            .into_iter()
            .map(|v| v.iter().map(|a| Arc::from(a.as_ref())).collect())
            .collect();
        let m = KripkeModel { up, valuation };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        for c in 0..self.len() {
            for d in bits(self.up[c]) {
                if d != c && self.le(d, c) {
                    return Err(Error::Invalid(format!("c{c} and c{d} lie on a cycle")));
                }
                if !self.valuation[c].is_subset(&self.valuation[d]) {
                    return Err(Error::Invalid(format!(
                        "valuation shrinks from c{c} to c{d}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn le(&self, c: usize, d: usize) -> bool {
        self.up[c] >> d & 1 == 1
    }

    pub fn valuation(&self, c: usize) -> &BTreeSet<Arc<str>> {
        &self.valuation[c]
    }

    pub fn is_maximal(&self, c: usize) -> bool {
        self.up[c] == 1 << c
    }

    /// Number of states on the longest chain.
    pub fn depth(&self) -> usize {
        fn go(m: &KripkeModel, c: usize) -> usize {
            1 + bits(m.up[c] & !(1 << c))
                .map(|d| go(m, d))
                .max()
                .unwrap_or(0)
        }
        (0..self.len()).map(|c| go(self, c)).max().unwrap_or(0)
    }

    /// The states forcing `f`, as a bit mask.
    pub fn forcing_set(&self, f: &Formula) -> u64 {
        match f {
            Formula::Var(x) => (0..self.len())
                .filter(|&c| self.valuation[c].contains(x))
                .fold(0, |m, c| m | 1 << c),
            Formula::Falsum => 0,
            Formula::Conj(a, b) => self.forcing_set(a) & self.forcing_set(b),
            Formula::Disj(a, b) => self.forcing_set(a) | self.forcing_set(b),
            Formula::Impl(a, b) => {
                let bad = self.forcing_set(a) & !self.forcing_set(b);
                (0..self.len())
                    .filter(|&c| self.up[c] & bad == 0)
                    .fold(0, |m, c| m | 1 << c)
            }
        }
    }

    pub fn forces(&self, c: usize, f: &Formula) -> bool {
        self.forcing_set(f) >> c & 1 == 1
    }

    /// Whether `c` forces every formula of `ctx` but not `goal`.
    pub fn refutes(&self, c: usize, ctx: &Context, goal: &Formula) -> bool {
        ctx.formulas().all(|f| self.forces(c, f)) && !self.forces(c, goal)
    }

    /// One line per hypothesis and for the goal, stating whether `c`
    /// forces it.
    pub fn transcript(&self, c: usize, ctx: &Context, goal: &Formula) -> String {
        let mark = |f: &Formula| if self.forces(c, f) { "||-" } else { "|/-" };
        let mut out = String::new();
        for (name, f) in ctx.iter() {
            out += &format!("c{c} {} {name}: {f}\n", mark(f));
        }
        out += &format!("c{c} {} goal: {goal}\n", mark(goal));
        out
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

/// Lists states, the covering pairs of the order, and the forced atoms.
impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        for c in 0..n {
            writeln!(f, "state c{c}")?;
        }
        for c in 0..n {
            let strict = self.up[c] & !(1 << c);
            for d in bits(strict) {
                let covered = bits(strict & !(1 << d)).all(|e| !self.le(e, d));
                if covered {
                    writeln!(f, "c{c} <= c{d}")?;
                }
            }
        }
        for c in 0..n {
            for a in &self.valuation[c] {
                writeln!(f, "c{c} ||- {a}")?;
            }
        }
        Ok(())
    }
}

/// Reads the format written by `Display`.
impl FromStr for KripkeModel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut order = Vec::new();
        let mut val: Vec<Vec<String>> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Line {
                line: n + 1,
                msg: msg.to_string(),
            };
            let find = |s: &str| {
                names
                    .iter()
                    .position(|x| x == s)
                    .ok_or_else(|| err("unknown state"))
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[..] {
                ["state", c] => {
                    if names.iter().any(|x| x == c) {
                        return Err(err("duplicate state"));
                    }
                    names.push(c.to_string());
                    val.push(Vec::new());
                }
                [c, "<=", d] => order.push((find(c)?, find(d)?)),
                [c, "||-", a] => {
                    let i = find(c)?;
                    val[i].push(a.to_string());
                }
                _ => return Err(err("expected 'state c', 'c <= d' or 'c ||- p'")),
            }
        }
        KripkeModel::new(&order, val)
    }
}

/// Rooted posets on `n` states as up-set masks, root `0`, one per
/// isomorphism class while `n` is small.
fn rooted_posets(max: usize) -> Vec<Vec<Vec<u64>>> {
    let mut levels = vec![vec![vec![1u64]]];
    for n in 2..=max {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for p in &levels[n - 2] {
            // Add state n-1 as a new maximal element above a down-closed set
            // containing the root.
            let new = n - 1;
            for below in 1u64..1 << (n - 1) {
                if below & 1 == 0 {
                    continue;
                }
                let down_closed = bits(below)
                    .all(|c| (0..n - 1).all(|d| !(p[d] >> c & 1 == 1) || below >> d & 1 == 1));
                if !down_closed {
                    continue;
                }
                let mut q = p.clone();
                for c in bits(below) {
                    q[c] |= 1 << new;
                }
                q.push(1 << new);
                if n > CANONICAL_LIMIT || seen.insert(canonical(&q)) {
                    next.push(q);
                }
            }
        }
        levels.push(next);
    }
    levels
}

/// Smallest adjacency encoding over relabellings that fix the root.
fn canonical(up: &[u64]) -> u64 {
    let n = up.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let encode = |perm: &[usize]| {
        let mut key = 0u64;
        for i in 0..n {
            for j in 0..n {
                key = key << 1 | (up[perm[i]] >> perm[j] & 1);
            }
        }
        key
    };
    // Heap's algorithm over positions 1..n.
    let k = n - 1;
    let mut c = vec![0usize; k];
    best = best.min(encode(&perm));
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(1, 1 + i);
            } else {
                perm.swap(1 + c[i], 1 + i);
            }
            best = best.min(encode(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn up_sets(up: &[u64]) -> Vec<u64> {
    let n = up.len();
    (0..1u64 << n)
        .filter(|&m| bits(m).all(|c| up[c] & !m == 0))
        .collect()
}

/// The first model, in order of size, poset and valuation, whose root
/// forces `ctx` but not `goal`. The root is state `0`. Returns `None` when
/// no model with at most `max_states` states exists; the search is not
/// complete for any fixed bound.
pub fn countermodel_search(
    ctx: &Context,
    goal: &Formula,
    max_states: usize,
) -> Option<(KripkeModel, usize)> {
    let max = max_states.min(MAX_STATES);
    let mut atoms: Vec<Arc<str>> = Vec::new();
    for f in ctx.formulas().chain([goal]) {
        for a in f.variables() {
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
    }
    for posets in rooted_posets(max) {
        for up in posets {
            let uppers = up_sets(&up);
            let mut choice = vec![0usize; atoms.len()];
            loop {
                let mut m = KripkeModel {
                    up: up.clone(),
                    valuation: vec![BTreeSet::new(); up.len()],
                };
                for (a, &u) in atoms.iter().zip(&choice) {
                    for c in bits(uppers[u]) {
                        m.valuation[c].insert(a.clone());
                    }
                }
                if m.refutes(0, ctx, goal) {
                    debug_assert!(m.check().is_ok());
                    return Some((m, 0));
                }
                // Odometer over the up-set chosen for each atom.
                let Some(i) = choice.iter().position(|&u| u + 1 < uppers.len()) else {
                    break;
                };
                choice[i] += 1;
                for x in &mut choice[..i] {
                    *x = 0;
                }
            }
        }
    }
    None
}

/// Atom limit for the exhaustive depth-two search.
const TWO_PLUS_ATOMS: usize = 16;

/// A countermodel of depth at most two with at most `length(f)` states for
/// an unprovable order-two-plus formula: a root below a set of maximal
/// states. `None` when `f` is provable.
pub fn countermodel_2plus(f: &Formula) -> Result<Option<(KripkeModel, usize)>> {
    let Some((args, target)) = literal_spine(f).filter(|_| is_order_two_plus(f)) else {
        return Err(Error::Fragment(format!(
            "{f} is not in the order-two-plus fragment"
        )));
    };
    if prove(&Context::new(), f).is_provable() {
        return Ok(None);
    }
    let atoms = f.variables();
    if atoms.len() > TWO_PLUS_ATOMS {
        return Err(Error::Invalid(format!("more than {TWO_PLUS_ATOMS} atoms")));
    }
    let names = |v: u64| -> Vec<&str> { bits(v).map(|i| &*atoms[i]).collect() };
    // Classical satisfaction, through a one-state model.
    let classical = |v: u64, g: &Formula| {
        KripkeModel::new::<&str>(&[], vec![names(v)])
            .expect("one state")
            .forces(0, g)
    };
    let all = 1u64 << atoms.len();
    let sat_args: Vec<u64> = (0..all)
        .filter(|&v| args.iter().all(|a| classical(v, a)))
        .collect();
    let bound = f.length();
    for k in 0..bound {
        for root in 0..all {
            let cands: Vec<u64> = sat_args
                .iter()
                .copied()
                .filter(|&v| v & root == root)
                .collect();
            if k == 0 {
                if sat_args.contains(&root) && !classical(root, target) {
                    let m = KripkeModel::new::<&str>(&[], vec![names(root)])?;
                    return Ok(Some((m, 0)));
                }
                continue;
            }
            if cands.len() < k {
                continue;
            }
            let mut pick: Vec<usize> = (0..k).collect();
            loop {
                let mut val = vec![names(root)];
                val.extend(pick.iter().map(|&i| names(cands[i])));
                let order: Vec<(usize, usize)> = (1..=k).map(|d| (0, d)).collect();
                let m = KripkeModel::new(&order, val)?;
                if args.iter().all(|a| m.forces(0, a)) && !m.forces(0, target) {
                    return Ok(Some((m, 0)));
                }
                // Next k-combination of the candidates.
                let Some(i) = (0..k).rev().find(|&i| pick[i] < cands.len() - k + i) else {
                    break;
                };
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
            }
        }
    }
    Err(Error::Invalid(format!(
        "no depth-two countermodel within {bound} states for {f}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn forcing_examples() {
        let one = KripkeModel::new(&[], vec![vec!["p"]]).unwrap();
        assert!(one.forces(0, &f("p \\/ q")));
        let empty = KripkeModel::new::<&str>(&[], vec![vec![]]).unwrap();
        assert!(empty.forces(0, &f("p -> q")));
        assert!(!empty.forces(0, &f("false")));
        let chain = KripkeModel::new(&[(0, 1)], vec![vec![], vec!["p"]]).unwrap();
        assert!(chain.forces(0, &f("~~p")));
        assert!(!chain.forces(0, &f("p")));
        assert!(!chain.forces(0, &f("p \\/ ~p")));
        assert_eq!(chain.depth(), 2);
    }

    #[test]
    fn invalid_models() {
        assert!(KripkeModel::new(&[(0, 1)], vec![vec!["p"], vec![]]).is_err());
        assert!(KripkeModel::new::<&str>(&[(0, 1), (1, 0)], vec![vec![], vec![]]).is_err());
        assert!(KripkeModel::new::<&str>(&[], vec![]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = KripkeModel::new(
            &[(0, 1), (1, 2), (0, 3)],
            vec![vec![], vec!["q"], vec!["p", "q"], vec!["p"]],
        )
        .unwrap();
        let text = m.to_string();
        assert!(text.contains("c0 <= c1\n"));
        assert!(!text.contains("c0 <= c2\n"));
        assert_eq!(text.parse::<KripkeModel>().unwrap(), m);
        assert!("state c0\nc0 ||- p\nc1 ||- q\n"
            .parse::<KripkeModel>()
            .is_err());
    }

    #[test]
    fn poset_counts() {
        // Rooted posets up to isomorphism: 1, 1, 2, 5, 16, 63.
        let counts: Vec<usize> = rooted_posets(6).iter().map(Vec::len).collect();
        assert_eq!(counts, [1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn search_examples() {
        let empty = Context::new();
        let (m, c) = countermodel_search(&empty, &f("((p -> q) -> p) -> p"), 2).unwrap();
        assert_eq!(m.len(), 2);
        assert!(!m.forces(c, &f("((p -> q) -> p) -> p")));
        assert!(countermodel_search(&empty, &f("p -> p"), 4).is_none());
        let g = f("(~p -> q) -> (~r -> q) -> (p -> ~r) -> q");
        assert!(countermodel_search(&empty, &g, 2).is_none());
        assert_eq!(countermodel_search(&empty, &g, 3).unwrap().0.len(), 3);
    }

    #[test]
    fn two_plus_examples() {
        let (m, c) = countermodel_2plus(&f("~~p -> p")).unwrap().unwrap();
        assert_eq!((m.len(), m.depth()), (2, 2));
        assert!(!m.forces(c, &f("~~p -> p")));
        assert!(countermodel_2plus(&f("p -> p")).unwrap().is_none());
        let g = f("(~p -> q) -> (~r -> q) -> (p -> ~r) -> q");
        let (m, _) = countermodel_2plus(&g).unwrap().unwrap();
        assert_eq!((m.len(), m.depth()), (3, 2));
        assert!(m.len() <= g.length());
        assert!(countermodel_2plus(&f("((p -> q) -> r) -> s")).is_err());
    }
}
