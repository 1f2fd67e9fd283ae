//! Linear bounded automata and their simulation by monotonic automata that
//! split a bounded computation recursively into halves.

use std::collections::HashSet;
use std::fmt;

use crate::automata::{Configuration, Instruction, MonotonicAutomaton};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: String,
    pub read: String,
    pub to: String,
    pub write: String,
    pub mv: Move,
}

/// A nondeterministic LBA. The head never leaves the input: a move past
/// either end leaves it where it is.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LbaDescription {
    pub states: Vec<String>,
    pub initial: String,
    pub accept: Vec<String>,
    /// Tape alphabet, including the input symbols.
    pub alphabet: Vec<String>,
    pub transitions: Vec<Transition>,
}

impl fmt::Display for LbaDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.initial)?;
        writeln!(f, "accept: {}", self.accept.join(" "))?;
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        for t in &self.transitions {
            let m = match t.mv {
                Move::Left => "L",
                Move::Right => "R",
                Move::Stay => "S",
            };
            writeln!(f, "{},{} -> {},{},{m}", t.from, t.read, t.to, t.write)?;
        }
        Ok(())
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl LbaDescription {
    /// Parses `states:`, `initial:`, `accept:`, `alphabet:` and transition
    /// lines `q,a -> q',b,M` with `M` one of `L`, `R`, `S`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lba = LbaDescription::default();
        let err = |line: usize, msg: &str| Error::Line {
            line,
            msg: msg.to_string(),
        };
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((lhs, rhs)) = content.split_once("->") {
                let l: Vec<&str> = lhs.split(',').map(str::trim).collect();
                let r: Vec<&str> = rhs.split(',').map(str::trim).collect();
                let ([from, read], [to, write, m]) = (&l[..], &r[..]) else {
                    return Err(err(line, "expected 'q,a -> q2,b,M'"));
                };
                let mv = match *m {
                    "L" => Move::Left,
                    "R" => Move::Right,
                    "S" => Move::Stay,
                    _ => return Err(err(line, "head move must be L, R or S")),
                };
                lba.transitions.push(Transition {
                    from: from.to_string(),
                    read: read.to_string(),
                    to: to.to_string(),
                    write: write.to_string(),
                    mv,
                });
                continue;
            }
            let Some((key, rest)) = content.split_once(':') else {
                return Err(err(line, "expected a 'key:' line or a transition"));
            };
            let words: Vec<String> = rest.split_whitespace().map(String::from).collect();
            match key.trim() {
                "states" => lba.states.extend(words),
                "accept" => lba.accept.extend(words),
                "alphabet" => lba.alphabet.extend(words),
                "initial" => match &words[..] {
                    [q] => lba.initial = q.clone(),
                    _ => return Err(err(line, "expected one initial state")),
                },
                k => return Err(err(line, &format!("unknown key {k:?}"))),
            }
        }
        lba.validate()?;
        Ok(lba)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(m));
        for s in self.states.iter().chain(&self.alphabet) {
            if !is_name(s) {
                return bad(format!("{s:?} is not a plain name"));
            }
        }
        let state = |s: &String| self.states.contains(s);
        let sym = |s: &String| self.alphabet.contains(s);
        if !state(&self.initial) {
            return bad(format!("initial state {} undeclared", self.initial));
        }
        if self.accept.is_empty() {
            return bad("no accepting state".into());
        }
        for q in &self.accept {
            if !state(q) {
                return bad(format!("accepting state {q} undeclared"));
            }
        }
        for t in &self.transitions {
            if !state(&t.from) || !state(&t.to) || !sym(&t.read) || !sym(&t.write) {
                return bad(format!(
                    "transition {},{} mentions an undeclared name",
                    t.from, t.read
                ));
            }
            if self.accept.contains(&t.from) {
                return bad(format!("accepting state {} has a transition", t.from));
            }
        }
        Ok(())
    }

    fn check_input<S: AsRef<str>>(&self, input: &[S]) -> Result<Vec<usize>> {
        if input.is_empty() {
            return Err(Error::Invalid("input must be nonempty".into()));
        }
        input
            .iter()
            .map(|a| {
                self.alphabet
                    .iter()
                    .position(|b| b == a.as_ref())
                    .ok_or_else(|| {
                        Error::Invalid(format!("symbol {:?} not in the alphabet", a.as_ref()))
                    })
            })
            .collect()
    }
}

/// Head position after a move on a tape of `n` cells (1-based).
fn moved(j: usize, mv: Move, n: usize) -> usize {
    match mv {
        Move::Left => j.saturating_sub(1).max(1),
        Move::Right => (j + 1).min(n),
        Move::Stay => j,
    }
}

/// Whether the LBA reaches an accepting state within `steps` steps.
pub fn accepts_within<S: AsRef<str>>(
    lba: &LbaDescription,
    input: &[S],
    steps: u64,
) -> Result<bool> {
    let tape = lba.check_input(input)?;
    let n = tape.len();
    let sym = |s: &String| lba.alphabet.iter().position(|b| b == s).expect("validated");
    type Conf = (String, Vec<usize>, usize);
    let start: Conf = (lba.initial.clone(), tape, 1);
    let mut seen: HashSet<Conf> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    for step in 0..=steps {
        if frontier.iter().any(|(q, _, _)| lba.accept.contains(q)) {
            return Ok(true);
        }
        if step == steps || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for (q, tape, j) in &frontier {
            for t in &lba.transitions {
                if t.from == *q && sym(&t.read) == tape[j - 1] {
                    let mut tape = tape.clone();
                    tape[j - 1] = sym(&t.write);
                    let c = (t.to.clone(), tape, moved(*j, t.mv, n));
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(false)
}

/// `ceil(log2(|Q| * n * |alphabet|^n)) + 1`: enough doublings to cover any
/// path through the configuration graph.
pub fn default_pn(lba: &LbaDescription, n: usize) -> usize {
    let configs = lba.states.len() as f64 * n as f64 * (lba.alphabet.len() as f64).powi(n as i32);
    configs.max(1.0).log2().ceil() as usize + 1
}

#[derive(Clone, Copy)]
enum Part {
    B,
    H,
    E,
}

impl Part {
    fn tag(self) -> char {
        match self {
            Part::B => 'B',
            Part::H => 'H',
            Part::E => 'E',
        }
    }
}

fn s_reg(x: Part, d: usize, q: &str) -> String {
    format!("s_{}{d}_{q}", x.tag())
}

fn c_reg(x: Part, d: usize, i: usize, a: &str) -> String {
    format!("c_{}{d}_{i}_{a}", x.tag())
}

fn h_reg(x: Part, d: usize, i: usize) -> String {
    format!("h_{}{d}_{i}", x.tag())
}

const FINAL: &str = "final";
const START: &str = "start";

struct Builder<'l> {
    lba: &'l LbaDescription,
    n: usize,
    states: Vec<String>,
    instructions: Vec<Instruction>,
}

impl Builder<'_> {
    fn state(&mut self, s: String) -> String {
        self.states.push(s.clone());
        s
    }

    fn push(&mut self, at: &str, check: &[String], set: &[String], goto: &str) {
        self.instructions.push(Instruction::CheckSet {
            at: at.to_string(),
            check: check.iter().cloned().collect(),
            set: set.iter().cloned().collect(),
            goto: goto.to_string(),
        });
    }

    /// Nondeterministically sets an (x, d)-code: one state register, one
    /// register per cell, one head register.
    fn guess(&mut self, x: Part, d: usize, from: &str, prefix: &str, to: &str) {
        let (lba, n) = (self.lba, self.n);
        let cell = |i: usize| format!("{prefix}_c{i}");
        let states: &[String] = if matches!(x, Part::E) && from == START {
            &lba.accept
        } else {
            &lba.states
        };
        let first = self.state(cell(1));
        for q in states {
            self.push(from, &[], &[s_reg(x, d, q)], &first);
        }
        for i in 1..=n {
            let next = if i == n {
                self.state(format!("{prefix}_h"))
            } else {
                self.state(cell(i + 1))
            };
            for a in &lba.alphabet {
                self.push(&cell(i), &[], &[c_reg(x, d, i, a)], &next);
            }
        }
        for j in 1..=n {
            self.push(&format!("{prefix}_h"), &[], &[h_reg(x, d, j)], to);
        }
    }

    /// Copies the (x, d)-code present in the store to (y, d - 1).
    fn copy(&mut self, x: Part, y: Part, d: usize, from: &str, prefix: &str, to: &str) {
        let (lba, n) = (self.lba, self.n);
        let cell = |i: usize| format!("{prefix}_c{i}");
        let first = self.state(cell(1));
        for q in &lba.states {
            self.push(from, &[s_reg(x, d, q)], &[s_reg(y, d - 1, q)], &first);
        }
        for i in 1..=n {
            let next = if i == n {
                self.state(format!("{prefix}_h"))
            } else {
                self.state(cell(i + 1))
            };
            for a in &lba.alphabet {
                self.push(
                    &cell(i),
                    &[c_reg(x, d, i, a)],
                    &[c_reg(y, d - 1, i, a)],
                    &next,
                );
            }
        }
        for j in 1..=n {
            self.push(
                &format!("{prefix}_h"),
                &[h_reg(x, d, j)],
                &[h_reg(y, d - 1, j)],
                to,
            );
        }
    }

    /// Checks that the B0 and E0 codes agree on every cell except `skip`.
    fn cells_equal(&mut self, from: &str, skip: Option<usize>, prefix: &str, to: &str) {
        let cells: Vec<usize> = (1..=self.n).filter(|&i| Some(i) != skip).collect();
        if cells.is_empty() {
            self.push(from, &[], &[], to);
            return;
        }
        let mut here = from.to_string();
        for (k, &i) in cells.iter().enumerate() {
            let next = if k + 1 == cells.len() {
                to.to_string()
            } else {
                self.state(format!("{prefix}_c{}", cells[k + 1]))
            };
            for a in &self.lba.alphabet.clone() {
                let mid = self.state(format!("{prefix}_c{i}_{a}"));
                self.push(&here, &[c_reg(Part::B, 0, i, a)], &[], &mid);
                self.push(&mid, &[c_reg(Part::E, 0, i, a)], &[], &next);
            }
            here = next;
        }
    }

    fn verify(&mut self) {
        let lba = self.lba;
        let n = self.n;
        // Same configuration.
        let vs = |q: &str| format!("V_s_{q}");
        let cells = self.state("V_c1".into());
        for q in &lba.states {
            let mid = self.state(vs(q));
            self.push("Q0", &[s_reg(Part::B, 0, q)], &[], &mid);
            self.push(&mid, &[s_reg(Part::E, 0, q)], &[], &cells);
        }
        let head = self.state("V_h".into());
        self.cells_equal(&cells, None, "V", &head);
        for j in 1..=n {
            let mid = self.state(format!("V_h_{j}"));
            self.push(&head, &[h_reg(Part::B, 0, j)], &[], &mid);
            self.push(&mid, &[h_reg(Part::E, 0, j)], &[], FINAL);
        }
        // One step: a single combined check per transition and head
        // position, then the untouched cells.
        for j in 1..=n {
            let rest = self.state(format!("V_t{j}"));
            for t in &lba.transitions {
                let j2 = moved(j, t.mv, n);
                let check = [
                    s_reg(Part::B, 0, &t.from),
                    h_reg(Part::B, 0, j),
                    c_reg(Part::B, 0, j, &t.read),
                    s_reg(Part::E, 0, &t.to),
                    h_reg(Part::E, 0, j2),
                    c_reg(Part::E, 0, j, &t.write),
                ];
                self.push("Q0", &check, &[], &rest);
            }
            self.cells_equal(&rest, Some(j), &format!("V_t{j}"), FINAL);
        }
    }
}

/// The monotonic automaton and initial configuration that accept exactly
/// when the LBA accepts `input` within `2^p_n` steps.
pub fn lba_to_automaton<S: AsRef<str>>(
    lba: &LbaDescription,
    input: &[S],
    p_n: usize,
) -> Result<(MonotonicAutomaton, Configuration)> {
    lba.validate()?;
    lba.check_input(input)?;
    if p_n == 0 {
        return Err(Error::Invalid("p_n must be at least 1".into()));
    }
    let n = input.len();
    let mut b = Builder {
        lba,
        n,
        states: vec![START.into(), FINAL.into()],
        instructions: Vec::new(),
    };
    b.state(format!("Q{p_n}"));
    b.guess(Part::E, p_n, START, "G", &format!("Q{p_n}"));
    for d in (1..=p_n).rev() {
        let q = format!("Q{d}");
        let lower = b.state(format!("Q{}", d - 1));
        let split = b.state(format!("{q}_split"));
        b.guess(Part::H, d, &q, &format!("{q}_g"), &split);
        let (qb, qe) = (b.state(format!("{q}_B")), b.state(format!("{q}_E")));
        b.instructions.push(Instruction::split(&split, &qb, &qe));
        let qbe = b.state(format!("{q}_BE"));
        b.copy(Part::B, Part::B, d, &qb, &format!("{q}_Bc"), &qbe);
        b.copy(Part::H, Part::E, d, &qbe, &format!("{q}_BEc"), &lower);
        let qee = b.state(format!("{q}_EE"));
        b.copy(Part::H, Part::B, d, &qe, &format!("{q}_Ec"), &qee);
        b.copy(Part::E, Part::E, d, &qee, &format!("{q}_EEc"), &lower);
    }
    b.verify();

    let mut seen = HashSet::new();
    let states: Vec<String> = b
        .states
        .into_iter()
        .filter(|s| seen.insert(s.clone()))
        .collect();
    let mut registers = Vec::new();
    for d in 0..=p_n {
        for x in [Part::B, Part::H, Part::E] {
            registers.extend(lba.states.iter().map(|q| s_reg(x, d, q)));
            for i in 1..=n {
                registers.extend(lba.alphabet.iter().map(|a| c_reg(x, d, i, a)));
            }
            registers.extend((1..=n).map(|i| h_reg(x, d, i)));
        }
    }
    let mut store: Vec<String> = vec![s_reg(Part::B, p_n, &lba.initial), h_reg(Part::B, p_n, 1)];
    for (i, a) in input.iter().enumerate() {
        store.push(c_reg(Part::B, p_n, i + 1, a.as_ref()));
    }
    let automaton = MonotonicAutomaton {
        states,
        registers,
        final_state: FINAL.into(),
        instructions: b.instructions,
    };
    let init = Configuration {
        state: START.into(),
        store: store.into_iter().collect(),
    };
    Ok((automaton, init))
}

/// Small machines used by tests and the command line.
pub mod battery {
    use super::LbaDescription;

    fn parse(text: &str) -> LbaDescription {
        LbaDescription::parse(text).expect("built-in machine")
    }

    /// Accepts every input without moving.
    pub fn immediate_accept() -> LbaDescription {
        parse("states: acc\ninitial: acc\naccept: acc\nalphabet: a b\n")
    }

    /// Accepts inputs whose first symbol is `a`.
    pub fn first_symbol() -> LbaDescription {
        parse("states: q0 acc\ninitial: q0\naccept: acc\nalphabet: a b\nq0,a -> acc,a,S\n")
    }

    /// Accepts inputs whose symbols are all equal. Visited cells are
    /// overwritten with `x`; reading an `x` means the head was pushed
    /// against the right end and stayed put.
    pub fn all_equal() -> LbaDescription {
        parse(
            "states: q0 qa qb acc
initial: q0
accept: acc
alphabet: a b x
q0,a -> qa,x,R
q0,b -> qb,x,R
qa,a -> qa,x,R
qb,b -> qb,x,R
qa,x -> acc,x,S
qb,x -> acc,x,S
",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{accepts, validate};

    fn words(len: usize) -> Vec<Vec<&'static str>> {
        (0..1u32 << len)
            .map(|bits| {
                (0..len)
                    .map(|i| if bits >> i & 1 == 1 { "b" } else { "a" })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn parse_round_trip() {
        let m = battery::all_equal();
        assert_eq!(LbaDescription::parse(&m.to_string()).unwrap(), m);
        assert!(LbaDescription::parse(
            "states: q\ninitial: q\naccept: q\nalphabet: a\nq,a -> q,a,S\n"
        )
        .is_err());
        assert!(matches!(
            LbaDescription::parse("states: q\nq,a -> q,a,X\n"),
            Err(Error::Line { line: 2, .. })
        ));
    }

    #[test]
    fn direct_simulation() {
        let m = battery::all_equal();
        for w in words(3) {
            let equal = w.iter().all(|a| *a == w[0]);
            assert_eq!(accepts_within(&m, &w, 8).unwrap(), equal, "{w:?}");
        }
        // Needs four steps on a three-cell tape.
        assert!(!accepts_within(&m, &["a", "a", "a"], 3).unwrap());
        assert!(accepts_within(&battery::first_symbol(), &["a", "b"], 1).unwrap());
        assert!(accepts_within(&m, &["c"], 1).is_err());
    }

    #[test]
    fn encodings_agree_with_simulation() {
        let m = battery::first_symbol();
        for w in [["a", "b"], ["b", "b"]] {
            let p = default_pn(&m, w.len());
            let (a, c) = lba_to_automaton(&m, &w, p).unwrap();
            assert!(validate(&a).is_empty());
            let r = accepts(&a, &c);
            assert_eq!(r.accepted, w[0] == "a");
            if let Some(t) = r.witness {
                assert!(t.is_valid_for(&a));
            }
        }
        let (a, c) = lba_to_automaton(&battery::immediate_accept(), &["b"], 1).unwrap();
        assert!(accepts(&a, &c).accepted);
    }

    #[test]
    fn step_bound_is_respected() {
        // Two doublings cover four steps but one covers only two.
        let m = battery::all_equal();
        let w = ["a", "a", "a"];
        for p in 1..=2 {
            let (a, c) = lba_to_automaton(&m, &w, p).unwrap();
            let direct = accepts_within(&m, &w, 1 << p).unwrap();
            assert_eq!(accepts(&a, &c).accepted, direct, "p = {p}");
        }
    }
}
