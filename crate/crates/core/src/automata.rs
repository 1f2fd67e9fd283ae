//! Monotonic automata: alternating machines whose registers are write-once
//! flags. Instructions either check and set registers or split the run into
//! two branches that must both accept.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::bitset::BitSet;

pub mod text;

pub use text::{parse_automaton, to_text};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// `at: check {..} set {..} goto p`
    CheckSet {
        at: String,
        check: BTreeSet<String>,
        set: BTreeSet<String>,
        goto: String,
    },
    /// `at: split left right`
    Split {
        at: String,
        left: String,
        right: String,
    },
}

impl Instruction {
    pub fn check_set<'a, I, J>(at: &str, check: I, set: J, goto: &str) -> Self
    where
        I: IntoIterator<Item = &'a str>,
        J: IntoIterator<Item = &'a str>,
    {
        Instruction::CheckSet {
            at: at.to_string(),
            check: check.into_iter().map(String::from).collect(),
            set: set.into_iter().map(String::from).collect(),
            goto: goto.to_string(),
        }
    }

    pub fn split(at: &str, left: &str, right: &str) -> Self {
        Instruction::Split {
            at: at.to_string(),
            left: left.to_string(),
            right: right.to_string(),
        }
    }

    pub fn at(&self) -> &str {
        match self {
            Instruction::CheckSet { at, .. } | Instruction::Split { at, .. } => at,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonicAutomaton {
    pub states: Vec<String>,
    pub registers: Vec<String>,
    pub final_state: String,
    pub instructions: Vec<Instruction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: String,
    pub store: BTreeSet<String>,
}

impl Configuration {
    pub fn new<'a, I: IntoIterator<Item = &'a str>>(state: &str, store: I) -> Self {
        Self {
            state: state.to_string(),
            store: store.into_iter().map(String::from).collect(),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {{", self.state)?;
        for (i, r) in self.store.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}>")
    }
}

/// An accepting computation: a tree whose leaves are in the final state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTree {
    pub config: Configuration,
    /// Index into the automaton's instructions; `None` at final leaves.
    pub instruction: Option<usize>,
    pub children: Vec<WitnessTree>,
}

impl WitnessTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(WitnessTree::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(WitnessTree::height)
            .max()
            .unwrap_or(0)
    }

    /// Checks every edge against `step` and every leaf against the final
    /// state.
    pub fn is_valid_for(&self, a: &MonotonicAutomaton) -> bool {
        match self.instruction {
            None => self.config.state == a.final_state && self.children.is_empty(),
            Some(i) => {
                let Some(instr) = a.instructions.get(i) else {
                    return false;
                };
                let next = step(a, &self.config, instr);
                !next.is_empty()
                    && next.len() == self.children.len()
                    && next
                        .iter()
                        .zip(&self.children)
                        .all(|(c, t)| *c == t.config && t.is_valid_for(a))
            }
        }
    }

    /// Whether some root-to-leaf path visits a configuration twice.
    pub fn has_repeated_configuration(&self) -> bool {
        fn go<'t>(t: &'t WitnessTree, path: &mut HashSet<&'t Configuration>) -> bool {
            if !path.insert(&t.config) {
                return true;
            }
            let found = t.children.iter().any(|c| go(c, path));
            path.remove(&t.config);
            found
        }
        go(self, &mut HashSet::new())
    }

    /// Whether stores only grow along every path.
    pub fn is_monotone(&self) -> bool {
        self.children
            .iter()
            .all(|c| self.config.store.is_subset(&c.config.store) && c.is_monotone())
    }

    /// Replaces a node by a descendant with the same configuration until no
    /// path repeats a configuration.
    fn shortcut(mut self) -> WitnessTree {
        while let Some(d) = self.find_repeat(&self.config.clone()) {
            self = d;
        }
        self.children = self
            .children
            .into_iter()
            .map(WitnessTree::shortcut)
            .collect();
        self
    }

    fn find_repeat(&self, c: &Configuration) -> Option<WitnessTree> {
        for child in &self.children {
            if child.config == *c {
                return Some(child.clone());
            }
            if let Some(d) = child.find_repeat(c) {
                return Some(d);
            }
        }
        None
    }
}

/// Successor configurations of `c` under `i`; empty when `i` does not apply.
pub fn step(_a: &MonotonicAutomaton, c: &Configuration, i: &Instruction) -> Vec<Configuration> {
    match i {
        Instruction::CheckSet {
            at,
            check,
            set,
            goto,
        } if *at == c.state && check.is_subset(&c.store) => {
            let mut store = c.store.clone();
            store.extend(set.iter().cloned());
            vec![Configuration {
                state: goto.clone(),
                store,
            }]
        }
        Instruction::Split { at, left, right } if *at == c.state => vec![
            Configuration {
                state: left.clone(),
                store: c.store.clone(),
            },
            Configuration {
                state: right.clone(),
                store: c.store.clone(),
            },
        ],
        _ => Vec::new(),
    }
}

/// Without universal branching.
pub fn is_nondeterministic(a: &MonotonicAutomaton) -> bool {
    a.instructions
        .iter()
        .all(|i| matches!(i, Instruction::CheckSet { .. }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect {
    pub instruction: Option<usize>,
    pub message: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instruction {
            Some(i) => write!(f, "instruction {}: {}", i + 1, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

pub fn validate(a: &MonotonicAutomaton) -> Vec<Defect> {
    let mut out = Vec::new();
    let mut global = |message: String| {
        out.push(Defect {
            instruction: None,
            message,
        })
    };
    let states: HashSet<&str> = a.states.iter().map(String::as_str).collect();
    let registers: HashSet<&str> = a.registers.iter().map(String::as_str).collect();
    if states.len() != a.states.len() {
        global("duplicate state declaration".into());
    }
    if registers.len() != a.registers.len() {
        global("duplicate register declaration".into());
    }
    if !states.contains(a.final_state.as_str()) {
        global("final state undeclared".into());
    }
    let mut shared: Vec<&str> = states.intersection(&registers).copied().collect();
    shared.sort_unstable();
    for n in shared {
        global(format!("{n} is both a state and a register"));
    }
    for (idx, instr) in a.instructions.iter().enumerate() {
        let mut bad = |message: String| {
            out.push(Defect {
                instruction: Some(idx),
                message,
            })
        };
        let (named_states, named_regs): (Vec<&String>, Vec<&String>) = match instr {
            Instruction::CheckSet {
                at,
                check,
                set,
                goto,
            } => (vec![at, goto], check.iter().chain(set.iter()).collect()),
            Instruction::Split { at, left, right } => (vec![at, left, right], vec![]),
        };
        for s in named_states {
            if !states.contains(s.as_str()) {
                bad(format!("unknown state {s}"));
            }
        }
        for r in named_regs {
            if !registers.contains(r.as_str()) {
                bad(format!("unknown register {r}"));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acceptance {
    pub accepted: bool,
    pub witness: Option<WitnessTree>,
    /// Configurations examined, including memo hits.
    pub visited: usize,
}

/// Decides whether `c` is accepting and, if so, extracts a witness tree
/// with no configuration repeated along a path.
pub fn accepts(a: &MonotonicAutomaton, c: &Configuration) -> Acceptance {
    run_deep(|| {
        let mut engine = Engine::new(a);
        let Some(root) = engine.start(c) else {
            return Acceptance {
                accepted: c.state == a.final_state,
                witness: (c.state == a.final_state).then(|| WitnessTree {
                    config: c.clone(),
                    instruction: None,
                    children: vec![],
                }),
                visited: 1,
            };
        };
        let plan = engine.search(root.0, root.1, 0).0;
        let witness = plan.map(|p| {
            let t = replay(a, &p, c.clone());
            if t.has_repeated_configuration() {
                t.shortcut()
            } else {
                t
            }
        });
        Acceptance {
            accepted: witness.is_some(),
            witness,
            visited: engine.visited,
        }
    })
}

/// Acceptance without building a witness.
pub fn is_accepting(a: &MonotonicAutomaton, c: &Configuration) -> bool {
    run_deep(|| {
        let mut engine = Engine::new(a);
        match engine.start(c) {
            Some((q, s)) => engine.search(q, s, 0).0.is_some(),
            None => c.state == a.final_state,
        }
    })
}

/// Runs a deeply recursive computation on a thread with a large stack.
pub(crate) fn run_deep<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(1 << 29)
            .spawn_scoped(s, f)
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    })
}

enum Plan {
    Final,
    Step(usize, Vec<Rc<Plan>>),
}

fn replay(a: &MonotonicAutomaton, plan: &Plan, config: Configuration) -> WitnessTree {
    match plan {
        Plan::Final => WitnessTree {
            config,
            instruction: None,
            children: vec![],
        },
        Plan::Step(i, next) => {
            let succ = step(a, &config, &a.instructions[*i]);
            debug_assert_eq!(succ.len(), next.len());
            let children = succ
                .into_iter()
                .zip(next)
                .map(|(c, p)| replay(a, p, c))
                .collect();
            WitnessTree {
                config,
                instruction: Some(*i),
                children,
            }
        }
    }
}

enum CInstr {
    Check {
        idx: usize,
        check: BitSet,
        set: BitSet,
        goto: usize,
    },
    Split {
        idx: usize,
        left: usize,
        right: usize,
    },
}

const NO_HIT: usize = usize::MAX;

type Key = (usize, BitSet);

struct Engine {
    state_ix: HashMap<String, usize>,
    reg_ix: HashMap<String, usize>,
    nregs: usize,
    final_ix: Option<usize>,
    by_state: Vec<Vec<CInstr>>,
    /// Registers checked anywhere reachable from each state. Acceptance of
    /// `(q, S)` depends only on `S` restricted to this set.
    relevant: Vec<BitSet>,
    memo: HashMap<Key, Option<Rc<Plan>>>,
    on_path: HashMap<Key, usize>,
    visited: usize,
}

impl Engine {
    fn new(a: &MonotonicAutomaton) -> Self {
        let mut state_ix = HashMap::new();
        for s in &a.states {
            let n = state_ix.len();
            state_ix.entry(s.clone()).or_insert(n);
        }
        let mut reg_ix = HashMap::new();
        for r in &a.registers {
            let n = reg_ix.len();
            reg_ix.entry(r.clone()).or_insert(n);
        }
        // Undeclared names still get indices so malformed input degrades
        // gracefully.
        for i in &a.instructions {
            match i {
                Instruction::CheckSet {
                    at,
                    check,
                    set,
                    goto,
                } => {
                    for s in [at, goto] {
                        let n = state_ix.len();
                        state_ix.entry(s.clone()).or_insert(n);
                    }
                    for r in check.iter().chain(set) {
                        let n = reg_ix.len();
                        reg_ix.entry(r.clone()).or_insert(n);
                    }
                }
                Instruction::Split { at, left, right } => {
                    for s in [at, left, right] {
                        let n = state_ix.len();
                        state_ix.entry(s.clone()).or_insert(n);
                    }
                }
            }
        }
        let nregs = reg_ix.len();
        let bits = |names: &BTreeSet<String>| {
            let mut b = BitSet::new(nregs);
            for n in names {
                b.insert(reg_ix[n]);
            }
            b
        };
        let mut by_state: Vec<Vec<CInstr>> = (0..state_ix.len()).map(|_| Vec::new()).collect();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); state_ix.len()];
        let mut relevant: Vec<BitSet> = vec![BitSet::new(nregs); state_ix.len()];
        for (idx, i) in a.instructions.iter().enumerate() {
            let at = state_ix[i.at()];
            match i {
                Instruction::CheckSet {
                    check, set, goto, ..
                } => {
                    let goto = state_ix[goto];
                    let check = bits(check);
                    relevant[at].union_with(&check);
                    preds[goto].push(at);
                    by_state[at].push(CInstr::Check {
                        idx,
                        check,
                        set: bits(set),
                        goto,
                    });
                }
                Instruction::Split { left, right, .. } => {
                    let (left, right) = (state_ix[left], state_ix[right]);
                    preds[left].push(at);
                    preds[right].push(at);
                    by_state[at].push(CInstr::Split { idx, left, right });
                }
            }
        }
        let mut work: Vec<usize> = (0..state_ix.len()).collect();
        while let Some(p) = work.pop() {
            let rel = relevant[p].clone();
            for &q in &preds[p] {
                if !rel.is_subset(&relevant[q]) {
                    relevant[q].union_with(&rel);
                    work.push(q);
                }
            }
        }
        let final_ix = state_ix.get(&a.final_state).copied();
        Self {
            state_ix,
            reg_ix,
            nregs,
            final_ix,
            by_state,
            relevant,
            memo: HashMap::new(),
            on_path: HashMap::new(),
            visited: 0,
        }
    }

    /// Compiles `c`; `None` when its state is unknown.
    fn start(&self, c: &Configuration) -> Option<(usize, BitSet)> {
        let q = *self.state_ix.get(&c.state)?;
        let mut s = BitSet::new(self.nregs);
        for r in &c.store {
            if let Some(&i) = self.reg_ix.get(r) {
                s.insert(i);
            }
        }
        Some((q, s))
    }

    fn search(&mut self, q: usize, store: BitSet, depth: usize) -> (Option<Rc<Plan>>, usize) {
        self.visited += 1;
        if Some(q) == self.final_ix {
            return (Some(Rc::new(Plan::Final)), NO_HIT);
        }
        let key = (q, store.intersection(&self.relevant[q]));
        if let Some(r) = self.memo.get(&key) {
            return (r.clone(), NO_HIT);
        }
        if let Some(&d) = self.on_path.get(&key) {
            return (None, d);
        }
        self.on_path.insert(key.clone(), depth);
        let store = key.1.clone();
        let mut hit = NO_HIT;
        let mut found = None;
        for k in 0..self.by_state[q].len() {
            match &self.by_state[q][k] {
                CInstr::Check {
                    idx,
                    check,
                    set,
                    goto,
                } => {
                    if !check.is_subset(&store) {
                        continue;
                    }
                    let (idx, goto) = (*idx, *goto);
                    let mut next = store.clone();
                    next.union_with(set);
                    let (p, h) = self.search(goto, next, depth + 1);
                    hit = hit.min(h);
                    if let Some(p) = p {
                        found = Some(Rc::new(Plan::Step(idx, vec![p])));
                        break;
                    }
                }
                CInstr::Split { idx, left, right } => {
                    let (idx, left, right) = (*idx, *left, *right);
                    let (l, h) = self.search(left, store.clone(), depth + 1);
                    hit = hit.min(h);
                    let Some(l) = l else { continue };
                    let (r, h) = self.search(right, store.clone(), depth + 1);
                    hit = hit.min(h);
                    if let Some(r) = r {
                        found = Some(Rc::new(Plan::Step(idx, vec![l, r])));
                        break;
                    }
                }
            }
        }
        self.on_path.remove(&key);
        if found.is_some() || hit >= depth {
            self.memo.insert(key, found.clone());
        }
        (found, hit)
    }
}
