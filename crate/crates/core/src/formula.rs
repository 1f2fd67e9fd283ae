//! Propositional formulas: syntax, concrete text form, and the structural
//! queries (order, targets, traces, subformulas) used by proof search and
//! the automaton constructions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// A formula of intuitionistic propositional logic.
///
/// Negation is not a constructor: `~a` is `Impl(a, Falsum)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Arc<str>),
    Falsum,
    Impl(Arc<Formula>, Arc<Formula>),
    Conj(Arc<Formula>, Arc<Formula>),
    Disj(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Impl(Arc::new(a), Arc::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::Conj(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Disj(Arc::new(a), Arc::new(b))
    }

    pub fn negation(a: Formula) -> Formula {
        Formula::imp(a, Formula::Falsum)
    }

    /// `a1 -> a2 -> ... -> target`.
    pub fn imps<I>(args: I, target: Formula) -> Formula
    where
        I: IntoIterator<Item = Formula>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(target, |acc, a| Formula::imp(a, acc))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::Falsum)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    pub fn is_disj(&self) -> bool {
        matches!(self, Formula::Disj(..))
    }

    pub fn var_name(&self) -> Option<&str> {
        match self {
            Formula::Var(n) => Some(n),
            _ => None,
        }
    }

    /// True when only variables and `->` occur.
    pub fn is_implicational(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::Impl(a, b) => a.is_implicational() && b.is_implicational(),
            _ => false,
        }
    }

    /// Number of nodes; `~p` counts as three.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Falsum => 1,
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Number of atom occurrences (variables and `false`).
    pub fn length(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Falsum => 1,
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                a.length() + b.length()
            }
        }
    }

    /// Splits `a1 -> ... -> an -> t` into its arguments and its final
    /// non-implication.
    pub fn unfold_impl(&self) -> (Vec<&Formula>, &Formula) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Formula::Impl(a, b) = cur {
            args.push(&**a);
            cur = b;
        }
        (args, cur)
    }

    /// Variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<Arc<str>> {
        fn go(f: &Formula, out: &mut Vec<Arc<str>>) {
            match f {
                Formula::Var(n) => {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                Formula::Falsum => {}
                Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

/// Order of an implicational formula: atoms are 0 and `a -> b` is
/// `max(order(b), order(a) + 1)`.
pub fn order(f: &Formula) -> Result<usize> {
    match f {
        Formula::Var(_) => Ok(0),
        Formula::Impl(a, b) => Ok(order(b)?.max(order(a)? + 1)),
        _ => Err(Error::Fragment(format!(
            "order is defined for implicational formulas only, got {f}"
        ))),
    }
}

/// Targets: the atoms and disjunctions reachable through conclusions of
/// implications and both sides of conjunctions. Returned in first-found
/// order without duplicates.
pub fn targets(f: &Formula) -> Vec<Formula> {
    fn go(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::Var(_) | Formula::Falsum | Formula::Disj(..) => {
                if !out.contains(f) {
                    out.push(f.clone());
                }
            }
            Formula::Impl(_, b) => go(b, out),
            Formula::Conj(a, b) => {
                go(a, out);
                go(b, out);
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

/// One elimination along a path from a hypothesis to one of its targets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    /// Apply to a proof of this argument.
    Arg(Formula),
    Fst,
    Snd,
}

/// All elimination paths from `f` down to `alpha`, in left-to-right order.
pub fn trace_paths(alpha: &Formula, f: &Formula) -> Vec<Vec<Step>> {
    fn go(alpha: &Formula, f: &Formula, prefix: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if f == alpha {
            out.push(prefix.clone());
            return;
        }
        match f {
            Formula::Impl(a, b) => {
                prefix.push(Step::Arg((**a).clone()));
                go(alpha, b, prefix, out);
                prefix.pop();
            }
            Formula::Conj(a, b) => {
                prefix.push(Step::Fst);
                go(alpha, a, prefix, out);
                prefix.pop();
                prefix.push(Step::Snd);
                go(alpha, b, prefix, out);
                prefix.pop();
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(alpha, f, &mut Vec::new(), &mut out);
    out
}

/// The argument set collected along a path, in first-occurrence order.
pub fn path_arguments(path: &[Step]) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for s in path {
        if let Step::Arg(a) = s {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
    }
    out
}

/// Traces to `alpha` in `f`: each trace is the set of arguments that must be
/// proved to eliminate `f` down to `alpha`. Empty when `alpha` is not a
/// target of `f`.
pub fn traces(alpha: &Formula, f: &Formula) -> Vec<Vec<Formula>> {
    let mut out: Vec<Vec<Formula>> = Vec::new();
    for p in trace_paths(alpha, f) {
        let args = path_arguments(&p);
        if !out.iter().any(|t| same_set(t, &args)) {
            out.push(args);
        }
    }
    out
}

fn same_set(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// All subformulas, including `f`, in post-order without duplicates.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut table = SubformulaTable::default();
    table.intern(f);
    table.formulas
}

/// Replaces every occurrence of the variable `p` by `g`.
pub fn substitute(f: &Formula, p: &str, g: &Formula) -> Formula {
    match f {
        Formula::Var(n) if &**n == p => g.clone(),
        Formula::Var(_) | Formula::Falsum => f.clone(),
        Formula::Impl(a, b) => Formula::imp(substitute(a, p, g), substitute(b, p, g)),
        Formula::Conj(a, b) => Formula::and(substitute(a, p, g), substitute(b, p, g)),
        Formula::Disj(a, b) => Formula::or(substitute(a, p, g), substitute(b, p, g)),
    }
}

/// `phi_k(1) = p1`, `phi_k(k+1) = phi_k(k) -> p(k+1)`.
pub fn phi_k(k: usize) -> Result<Formula> {
    if k == 0 {
        return Err(Error::Invalid("phi_k needs k >= 1".into()));
    }
    let mut f = Formula::var("p1");
    for i in 2..=k {
        f = Formula::imp(f, Formula::var(&format!("p{i}")));
    }
    Ok(f)
}

/// Dense integer ids for a closed set of subformulas.
#[derive(Clone, Debug, Default)]
pub struct SubformulaTable {
    formulas: Vec<Formula>,
    ids: HashMap<Formula, usize>,
}

impl SubformulaTable {
    /// Interns `f` and all its subformulas; children get smaller ids.
    pub fn intern(&mut self, f: &Formula) -> usize {
        if let Some(&id) = self.ids.get(f) {
            return id;
        }
        match f {
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                self.intern(a);
                self.intern(b);
            }
            _ => {}
        }
        let id = self.formulas.len();
        self.formulas.push(f.clone());
        self.ids.insert(f.clone(), id);
        id
    }

    pub fn id(&self, f: &Formula) -> Option<usize> {
        self.ids.get(f).copied()
    }

    pub fn get(&self, id: usize) -> &Formula {
        &self.formulas[id]
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Formula)> {
        self.formulas.iter().enumerate()
    }
}

/// An ordered assignment of proof variables to formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: IndexMap<String, Formula>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name : f`. Re-adding the same pair is a no-op; rebinding a name
    /// to a different formula is an error.
    pub fn insert(&mut self, name: &str, f: Formula) -> Result<()> {
        match self.entries.get(name) {
            Some(old) if *old == f => Ok(()),
            Some(old) => Err(Error::Invalid(format!(
                "proof variable {name} already declared as {old}"
            ))),
            None => {
                self.entries.insert(name.to_string(), f);
                Ok(())
            }
        }
    }

    pub fn with(mut self, name: &str, f: Formula) -> Result<Self> {
        self.insert(name, f)?;
        Ok(self)
    }

    /// Builds a context naming the formulas `prefix1, prefix2, ...`.
    pub fn from_formulas<I: IntoIterator<Item = Formula>>(prefix: &str, fs: I) -> Self {
        let mut ctx = Context::new();
        for (i, f) in fs.into_iter().enumerate() {
            ctx.entries.insert(format!("{prefix}{}", i + 1), f);
        }
        ctx
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.entries.get(name)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `G1 -> ... -> Gn -> goal`.
    pub fn implication_to(&self, goal: Formula) -> Formula {
        Formula::imps(self.formulas().cloned().collect::<Vec<_>>(), goal)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, phi)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {phi}")?;
        }
        Ok(())
    }
}

// Printing. Precedence: 1 = implication, 2 = disjunction, 3 = conjunction,
// 4 = units (atoms, negations, parenthesised).

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Var(_) | Formula::Falsum => 4,
        Formula::Impl(_, b) if **b == Formula::Falsum => 4,
        Formula::Impl(..) => 1,
        Formula::Disj(..) => 2,
        Formula::Conj(..) => 3,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        write!(out, "(")?;
        write_formula(f, out)?;
        write!(out, ")")
    } else {
        write_formula(f, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Var(n) => write!(out, "{n}"),
        Formula::Falsum => write!(out, "false"),
        Formula::Impl(a, b) if **b == Formula::Falsum => {
            write!(out, "~")?;
            write_at(a, 4, out)
        }
        Formula::Impl(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " -> ")?;
            write_at(b, 1, out)
        }
        Formula::Disj(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " \\/ ")?;
            write_at(b, 3, out)
        }
        Formula::Conj(a, b) => {
            write_at(a, 3, out)?;
            write!(out, " /\\ ")?;
            write_at(b, 4, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

// Parsing.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Arrow,
    And,
    Or,
    Not,
    False,
    LParen,
    RParen,
    /// Any other punctuation, left for callers embedding formulas in a
    /// larger syntax.
    Punct(&'static str),
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes formula and proof-term text. Positions are byte offsets.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    const PUNCT: [&str; 10] = ["=>", ".1", ".2", "\\", ":", ".", ",", "<", ">", "|"];
    let mut toks = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        let rest = &text[pos..];
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let fixed: &[(&str, Tok)] = &[
            ("->", Tok::Arrow),
            ("\\/", Tok::Or),
            ("/\\", Tok::And),
            ("→", Tok::Arrow),
            ("∧", Tok::And),
            ("∨", Tok::Or),
            ("¬", Tok::Not),
            ("⊥", Tok::False),
            ("~", Tok::Not),
            ("(", Tok::LParen),
            (")", Tok::RParen),
        ];
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            toks.push((t.clone(), pos));
            for _ in 0..s.chars().count() {
                it.next();
            }
            continue;
        }
        if let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) {
            toks.push((Tok::Punct(p), pos));
            for _ in 0..p.len() {
                it.next();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut end = pos;
            while let Some(&(i, ch)) = it.peek() {
                if is_ident_char(ch) {
                    end = i + ch.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let word = &text[pos..end];
            if word == "false" {
                toks.push((Tok::False, pos));
            } else {
                toks.push((Tok::Ident(word.to_string()), pos));
            }
            continue;
        }
        return Err(Error::Syntax {
            pos,
            msg: format!("unexpected character {c:?}"),
        });
    }
    Ok(toks)
}

pub(crate) struct FormulaParser<'t> {
    pub toks: &'t [(Tok, usize)],
    pub pos: usize,
    pub end: usize,
}

impl<'t> FormulaParser<'t> {
    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    pub fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut acc = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut acc = self.unit()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            acc = Formula::and(acc, self.unit()?);
        }
        Ok(acc)
    }

    fn unit(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Ident(n)) => {
                self.pos += 1;
                Ok(Formula::var(&n))
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::Falsum)
            }
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::negation(self.unit()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(t) => self.err(format!("expected a formula, found {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses the concrete formula syntax (`->`, `\/`, `/\`, `~`, `false`).
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut p = FormulaParser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos != toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

/// Parses `x: F, y: G` (names optional: bare formulas get `h1, h2, ...`).
/// Formulas are separated by `,` at parenthesis depth zero.
pub fn parse_context(text: &str) -> Result<Context> {
    let mut ctx = Context::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut pieces = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                pieces.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push((start, &text[start..]));
    let mut anon = 0;
    for (offset, piece) in pieces {
        if piece.trim().is_empty() {
            continue;
        }
        let (name, body) = match split_binding(piece) {
            Some((n, b)) => (n.to_string(), b),
            None => {
                anon += 1;
                (format!("h{anon}"), piece)
            }
        };
        let f = parse_formula(body).map_err(|e| e.shifted(offset))?;
        ctx.insert(&name, f)?;
    }
    Ok(ctx)
}

fn split_binding(piece: &str) -> Option<(&str, &str)> {
    let (lhs, rhs) = piece.split_once(':')?;
    let name = lhs.trim();
    let mut chars = name.chars();
    if chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char) {
        Some((name, rhs))
    } else {
        None
    }
}
