//! Recognition of the low-order implicational fragments.
//!
//! The three-minus family is defined over a partition of the variables into
//! data and control atoms. Formulas do not carry a partition, so membership
//! is decided as "member under some partition" and the witnessing partition
//! is reported.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::formula::{order, Formula};

/// Data/control split of the variables of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub data: Vec<String>,
    pub control: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentClass {
    pub is_implicational: bool,
    pub order: Option<usize>,
    pub in_t1m: bool,
    pub in_t2m: bool,
    pub in_t3m: bool,
    /// Partition witnessing the smallest three-minus class the formula
    /// belongs to, if any.
    pub partition: Option<Partition>,
    pub in_order_two_plus: bool,
}

pub fn classify(f: &Formula) -> FragmentClass {
    let is_implicational = f.is_implicational();
    let order = order(f).ok();
    let (mut in_t1m, mut in_t2m, mut in_t3m, mut partition) = (false, false, false, None);
    if is_implicational {
        let vars = f.variables();
        let mut found = |level: Level| -> bool {
            match solve(f, level) {
                Some(asg) => {
                    if partition.is_none() {
                        partition = Some(to_partition(&vars, &asg));
                    }
                    true
                }
                None => false,
            }
        };
        in_t1m = found(Level::One);
        in_t2m = in_t1m || found(Level::Two);
        in_t3m = in_t2m || found(Level::Three);
    }
    FragmentClass {
        is_implicational,
        order,
        in_t1m,
        in_t2m,
        in_t3m,
        partition,
        in_order_two_plus: is_order_two_plus(f),
    }
}

/// Variables or negated variables; `false` counts as a distinguished atom.
pub fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Var(_) | Formula::Falsum => true,
        Formula::Impl(a, b) => a.is_var() && **b == Formula::Falsum,
        _ => false,
    }
}

/// Splits a formula into arguments and target, treating literals as units.
/// `None` when a conjunction or disjunction is met.
pub fn literal_spine(f: &Formula) -> Option<(Vec<&Formula>, &Formula)> {
    let mut args = Vec::new();
    let mut cur = f;
    loop {
        if is_literal(cur) {
            return Some((args, cur));
        }
        match cur {
            Formula::Impl(a, b) => {
                args.push(&**a);
                cur = b;
            }
            _ => return None,
        }
    }
}

/// Order two when literals count as order zero: every argument of every
/// argument is a literal.
pub fn is_order_two_plus(f: &Formula) -> bool {
    let Some((args, _)) = literal_spine(f) else {
        return false;
    };
    args.iter().all(|xi| match literal_spine(xi) {
        Some((inner, _)) => inner.iter().all(|q| is_literal(q)),
        None => false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Level {
    One,
    Two,
    Three,
}

/// `true` means control.
type Assignment = BTreeMap<Arc<str>, bool>;
type Constraints = Vec<(Arc<str>, bool)>;

fn to_partition(vars: &[Arc<str>], asg: &Assignment) -> Partition {
    let mut p = Partition::default();
    for v in vars {
        if asg.get(v).copied().unwrap_or(false) {
            p.control.push(v.to_string());
        } else {
            p.data.push(v.to_string());
        }
    }
    p
}

fn var(f: &Formula) -> Option<Arc<str>> {
    match f {
        Formula::Var(n) => Some(n.clone()),
        _ => None,
    }
}

/// Constraints making `f` a member of the one-minus class.
fn t1(f: &Formula) -> Option<Constraints> {
    let (args, target) = f.unfold_impl();
    let mut cs = Vec::with_capacity(args.len() + 1);
    for a in args {
        cs.push((var(a)?, false));
    }
    cs.push((var(target)?, true));
    Some(cs)
}

/// Every way of deriving `f` in the two-minus grammar, as constraint sets.
fn t2(f: &Formula) -> Vec<Constraints> {
    let (args, target) = f.unfold_impl();
    let mut out = Vec::new();
    let Some(t) = var(target) else {
        return out;
    };
    // Leading data arguments, then either the target or one one-minus
    // argument followed by a one-minus remainder.
    let mut prefix: Constraints = Vec::new();
    for (j, a) in args.iter().enumerate() {
        if let Some(mut cs) = t1(a) {
            let rest: Option<Constraints> = args[j + 1..]
                .iter()
                .map(|b| var(b).map(|n| (n, false)))
                .collect();
            if let Some(rest) = rest {
                cs.extend(prefix.iter().cloned());
                cs.extend(rest);
                cs.push((t.clone(), true));
                out.push(cs);
            }
        }
        match var(a) {
            Some(n) => prefix.push((n, false)),
            None => return out,
        }
    }
    prefix.push((t, true));
    out.push(prefix);
    out
}

fn consistent(asg: &Assignment, cs: &Constraints) -> bool {
    cs.iter().all(|(n, b)| asg.get(n).is_none_or(|v| v == b))
        && cs
            .iter()
            .all(|(n, b)| cs.iter().all(|(m, c)| m != n || b == c))
}

fn solve(f: &Formula, level: Level) -> Option<Assignment> {
    let mut options: Vec<Vec<Constraints>> = match level {
        Level::One => vec![vec![t1(f)?]],
        Level::Two => vec![t2(f)],
        Level::Three => {
            let (args, target) = f.unfold_impl();
            let mut opts = vec![vec![vec![(var(target)?, true)]]];
            for a in args {
                // An atomic argument fits either as data or as a control
                // atom of the two-minus class.
                if !a.is_var() {
                    opts.push(t2(a));
                }
            }
            opts
        }
    };
    let mut asg = Assignment::new();
    if !propagate(&mut options, &mut asg) {
        return None;
    }
    search(&options, 0, &mut asg).then_some(asg)
}

/// Drops options that contradict `asg` and commits constraints shared by
/// all remaining options of a slot, until nothing changes.
fn propagate(options: &mut [Vec<Constraints>], asg: &mut Assignment) -> bool {
    loop {
        let mut changed = false;
        for slot in options.iter_mut() {
            slot.retain(|cs| consistent(asg, cs));
            let Some(first) = slot.first() else {
                return false;
            };
            let common: Constraints = first
                .iter()
                .filter(|c| slot.iter().all(|cs| cs.contains(c)))
                .cloned()
                .collect();
            for (n, b) in common {
                if asg.insert(n, b).is_none() {
                    changed = true;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(options: &[Vec<Constraints>], i: usize, asg: &mut Assignment) -> bool {
    let Some(slot) = options.get(i) else {
        return true;
    };
    for cs in slot {
        if !consistent(asg, cs) {
            continue;
        }
        let added: Vec<Arc<str>> = cs
            .iter()
            .filter(|(n, _)| !asg.contains_key(n))
            .map(|(n, _)| n.clone())
            .collect();
        for (n, b) in cs {
            asg.insert(n.clone(), *b);
        }
        if search(options, i + 1, asg) {
            return true;
        }
        for n in added {
            asg.remove(&n);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, phi_k};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn one_minus_example() {
        let c = classify(&f("p -> q"));
        assert!(c.in_t1m && c.in_t2m && c.in_t3m);
        let part = c.partition.unwrap();
        assert_eq!(part.data, ["p"]);
        assert_eq!(part.control, ["q"]);
    }

    #[test]
    fn three_minus_not_two_minus() {
        let c = classify(&f("((p1 -> q2) -> q1) -> q1"));
        assert!(c.in_t3m);
        assert!(!c.in_t2m);
        assert!(!c.in_t1m);
        let part = c.partition.unwrap();
        assert_eq!(part.data, ["p1"]);
        assert_eq!(part.control, ["q2", "q1"]);
    }

    #[test]
    fn forced_both_ways_is_rejected() {
        // q must be control (target) and data (argument of a one-minus
        // argument), so no partition works.
        let c = classify(&f("((q -> r) -> s) -> q"));
        assert!(!c.in_t3m);
        assert!(classify(&f("((p -> r) -> s) -> q")).in_t3m);
        let c = classify(&f("(((a -> b) -> c) -> d) -> e"));
        assert!(!c.in_t3m);
        assert_eq!(c.order, Some(4));
    }

    #[test]
    fn order_two_plus_example() {
        let c = classify(&f("(~p -> q) -> (~r -> q) -> (p -> ~r) -> q"));
        assert!(c.in_order_two_plus);
        assert!(!c.is_implicational);
        assert!(classify(&f("(~p -> q) -> q")).in_order_two_plus);
        assert!(!classify(&f("((p -> q) -> r) -> s")).in_order_two_plus);
        assert!(!classify(&f("p /\\ q -> q")).in_order_two_plus);
    }

    #[test]
    fn hierarchy_formulas_are_implicational() {
        for k in 1..7 {
            let c = classify(&phi_k(k).unwrap());
            assert!(c.is_implicational);
            assert_eq!(c.order, Some(k - 1));
            assert!(!c.in_t1m || c.in_t2m);
            assert!(!c.in_t2m || c.in_t3m);
        }
    }
}
