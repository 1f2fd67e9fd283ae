//! 3-CNF instances and their encodings into the three-minus fragment
//! (provable iff satisfiable) and into order-two-plus contexts (deriving
//! falsum iff unsatisfiable).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Context, Formula};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: &str) -> Self {
        Literal {
            var: var.into(),
            positive: true,
        }
    }

    pub fn neg(var: &str) -> Self {
        Literal {
            var: var.into(),
            positive: false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "~")?;
        }
        write!(f, "{}", self.var)
    }
}

pub type Valuation = BTreeMap<String, bool>;

/// A conjunction of clauses with exactly three literals each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf3 {
    pub variables: Vec<String>,
    pub clauses: Vec<[Literal; 3]>,
}

impl fmt::Display for Cnf3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, [a, b, c]) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " /\\ ")?;
            }
            write!(f, "({a} \\/ {b} \\/ {c})")?;
        }
        Ok(())
    }
}

impl Cnf3 {
    /// Builds an instance, declaring variables in order of first use.
    pub fn new(clauses: Vec<[Literal; 3]>) -> Self {
        let mut variables: Vec<String> = Vec::new();
        for l in clauses.iter().flatten() {
            if !variables.contains(&l.var) {
                variables.push(l.var.clone());
            }
        }
        Cnf3 { variables, clauses }
    }

    pub fn check(&self) -> Result<()> {
        for l in self.clauses.iter().flatten() {
            if !self.variables.contains(&l.var) {
                return Err(Error::Invalid(format!("undeclared variable {}", l.var)));
            }
        }
        if self.variables.is_empty() || self.clauses.is_empty() {
            return Err(Error::Invalid(
                "need at least one variable and one clause".into(),
            ));
        }
        Ok(())
    }

    /// Parses DIMACS CNF. Variable `k` becomes `p{k}`. With `pad`, short
    /// clauses repeat their last literal; otherwise every clause must have
    /// exactly three literals.
    pub fn parse_dimacs(text: &str, pad: bool) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Line { line, msg };
        let mut declared: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<(i64, usize)> = Vec::new();
        let mut last_line = 0;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            last_line = line;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('c') || content.starts_with('%') {
                continue;
            }
            if content.starts_with('p') {
                let parts: Vec<&str> = content.split_whitespace().collect();
                let parsed = match parts[..] {
                    ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                    _ => None,
                };
                declared =
                    Some(parsed.ok_or_else(|| err(line, "expected 'p cnf VARS CLAUSES'".into()))?);
                continue;
            }
            let Some((vars, _)) = declared else {
                return Err(err(line, "clause before the problem line".into()));
            };
            for tok in content.split_whitespace() {
                let k: i64 = tok
                    .parse()
                    .map_err(|_| err(line, format!("bad literal {tok:?}")))?;
                if k == 0 {
                    clauses.push(close_clause(std::mem::take(&mut current), pad)?);
                } else if k.unsigned_abs() as usize > vars {
                    return Err(err(
                        line,
                        format!("variable {} exceeds the declared {vars}", k.abs()),
                    ));
                } else {
                    current.push((k, line));
                }
            }
        }
        if !current.is_empty() {
            return Err(err(last_line, "clause not terminated by 0".into()));
        }
        let Some((vars, count)) = declared else {
            return Err(Error::Invalid("missing problem line".into()));
        };
        if clauses.len() != count {
            return Err(Error::Invalid(format!(
                "problem line declares {count} clauses, found {}",
                clauses.len()
            )));
        }
        let cnf = Cnf3 {
            variables: (1..=vars).map(|k| format!("p{k}")).collect(),
            clauses,
        };
        cnf.check()?;
        Ok(cnf)
    }

    pub fn eval(&self, v: &Valuation) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| v.get(&l.var).copied().unwrap_or(false) == l.positive)
        })
    }

    /// A satisfying valuation, by exhausting the truth table.
    pub fn satisfying_valuation(&self) -> Option<Valuation> {
        let n = self.variables.len();
        assert!(n < 32, "truth table too large");
        (0..1u64 << n).find_map(|bits| {
            let v: Valuation = self
                .variables
                .iter()
                .enumerate()
                .map(|(i, x)| (x.clone(), bits >> i & 1 == 1))
                .collect();
            self.eval(&v).then_some(v)
        })
    }

    pub fn is_satisfiable(&self) -> bool {
        self.satisfying_valuation().is_some()
    }
}

fn close_clause(lits: Vec<(i64, usize)>, pad: bool) -> Result<[Literal; 3]> {
    let line = lits.last().map_or(0, |l| l.1);
    let mut lits: Vec<Literal> = lits
        .into_iter()
        .map(|(k, _)| Literal {
            var: format!("p{}", k.abs()),
            positive: k > 0,
        })
        .collect();
    if pad && !lits.is_empty() {
        while lits.len() < 3 {
            lits.push(lits[lits.len() - 1].clone());
        }
    }
    <[Literal; 3]>::try_from(lits).map_err(|l| Error::Line {
        line,
        msg: format!("clause has {} literals, expected 3", l.len()),
    })
}

/// Suffix of primes making `v'` fresh for every variable `v`.
fn prime_suffix(vars: &[String]) -> String {
    let used: BTreeSet<&str> = vars.iter().map(String::as_str).collect();
    let mut suffix = String::from("'");
    while vars
        .iter()
        .any(|v| used.contains(format!("{v}{suffix}").as_str()))
    {
        suffix.push('\'');
    }
    suffix
}

/// The axioms and goal of the three-minus encoding. Data atoms are the
/// variables and their primed copies; control atoms are `q{i}` and `c{j}`.
pub fn cnf_to_np_axioms(psi: &Cnf3) -> Result<(Vec<Formula>, Formula)> {
    psi.check()?;
    let suffix = prime_suffix(&psi.variables);
    let mut used: BTreeSet<String> = psi.variables.iter().cloned().collect();
    used.extend(psi.variables.iter().map(|v| format!("{v}{suffix}")));
    let n = psi.variables.len();
    let k = psi.clauses.len();
    let mut suf = String::new();
    while (1..=n).any(|i| used.contains(&format!("q{i}{suf}")))
        || (1..=k).any(|j| used.contains(&format!("c{j}{suf}")))
    {
        suf.push('_');
    }
    let q = |i: usize| Formula::var(&format!("q{i}{suf}"));
    let c = |j: usize| Formula::var(&format!("c{j}{suf}"));
    let p = |i: usize| Formula::var(&psi.variables[i - 1]);
    let pp = |i: usize| Formula::var(&format!("{}{suffix}", psi.variables[i - 1]));
    let rho = |l: &Literal| {
        if l.positive {
            Formula::var(&l.var)
        } else {
            Formula::var(&format!("{}{suffix}", l.var))
        }
    };
    let mut gamma = Vec::new();
    for i in 1..=n {
        let next = if i < n { q(i + 1) } else { c(1) };
        gamma.push(Formula::imp(Formula::imp(p(i), next.clone()), q(i)));
        gamma.push(Formula::imp(Formula::imp(pp(i), next), q(i)));
    }
    for (j, clause) in psi.clauses.iter().enumerate() {
        let j = j + 1;
        for l in clause {
            gamma.push(if j < k {
                Formula::imps([rho(l), c(j + 1)], c(j))
            } else {
                Formula::imp(rho(l), c(k))
            });
        }
    }
    Ok((gamma, q(1)))
}

/// `Gamma -> q1`, provable exactly when `psi` is satisfiable.
pub fn cnf_to_np_formula(psi: &Cnf3) -> Result<Formula> {
    let (gamma, goal) = cnf_to_np_axioms(psi)?;
    Ok(Formula::imps(gamma, goal))
}

/// The context `X1..Xn, Y1..Yk` deriving falsum exactly when `psi` is
/// unsatisfiable.
pub fn cnf_to_conp_context(psi: &Cnf3) -> Result<(Context, Formula)> {
    psi.check()?;
    let suffix = prime_suffix(&psi.variables);
    let primed = |v: &str| Formula::var(&format!("{v}{suffix}"));
    let mut ctx = Context::new();
    for (i, v) in psi.variables.iter().enumerate() {
        let x = Formula::imps(
            [
                Formula::negation(Formula::var(v)),
                Formula::negation(primed(v)),
            ],
            Formula::Falsum,
        );
        ctx.insert(&format!("X{}", i + 1), x)?;
    }
    for (j, clause) in psi.clauses.iter().enumerate() {
        let args: Vec<Formula> = clause
            .iter()
            .map(|l| {
                if l.positive {
                    primed(&l.var)
                } else {
                    Formula::var(&l.var)
                }
            })
            .collect();
        ctx.insert(&format!("Y{}", j + 1), Formula::imps(args, Formula::Falsum))?;
    }
    Ok((ctx, Formula::Falsum))
}
