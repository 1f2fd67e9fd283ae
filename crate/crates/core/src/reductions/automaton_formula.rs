//! Monotonic automata as order-three implicational formulas: states and
//! registers become atoms and each instruction an axiom of order at most two.

use std::collections::{BTreeMap, HashSet};

use crate::automata::{Configuration, Instruction, MonotonicAutomaton};
use crate::formula::{is_ident_char, is_ident_start, Context, Formula};
use crate::reductions::ipc_automaton::ipc_to_automaton;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomatonEncoding {
    /// The registers of the initial store, the final state, then one axiom
    /// per instruction.
    pub context: Context,
    /// The atom of the initial state.
    pub goal: Formula,
    /// Atom chosen for each state and register whose name could not be used
    /// as is.
    pub renamed: BTreeMap<String, String>,
}

impl AutomatonEncoding {
    /// `context -> goal`.
    pub fn formula(&self) -> Formula {
        self.context.implication_to(self.goal.clone())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(is_ident_start) && cs.all(is_ident_char) && s != "false"
}

fn sanitize(prefix: &str, s: &str) -> String {
    let body: String = s
        .chars()
        .map(|c| if is_ident_char(c) { c } else { '_' })
        .collect();
    format!("{prefix}{body}")
}

/// Assigns atoms to state and register names, keeping names that are
/// already distinct identifiers.
#[derive(Default)]
struct Namer {
    used: HashSet<String>,
    atoms: BTreeMap<(bool, String), String>,
    renamed: BTreeMap<String, String>,
}

impl Namer {
    fn claim(&mut self, is_reg: bool, name: &str) {
        if self.atoms.contains_key(&(is_reg, name.to_string())) {
            return;
        }
        let mut atom = if is_identifier(name) && !self.used.contains(name) {
            name.to_string()
        } else {
            sanitize(if is_reg { "reg_" } else { "st_" }, name)
        };
        while self.used.contains(&atom) {
            atom.push('\'');
        }
        if atom != name {
            self.renamed.insert(name.to_string(), atom.clone());
        }
        self.used.insert(atom.clone());
        self.atoms.insert((is_reg, name.to_string()), atom);
    }

    fn atom(&self, is_reg: bool, name: &str) -> Formula {
        Formula::var(&self.atoms[&(is_reg, name.to_string())])
    }
}

pub fn automaton_to_formula(a: &MonotonicAutomaton, c0: &Configuration) -> AutomatonEncoding {
    let mut namer = Namer::default();
    // States first, so registers give way on a clash.
    for s in a.states.iter().chain([&a.final_state, &c0.state]) {
        namer.claim(false, s);
    }
    for i in &a.instructions {
        match i {
            Instruction::CheckSet { at, goto, .. } => {
                for s in [at, goto] {
                    namer.claim(false, s);
                }
            }
            Instruction::Split { at, left, right } => {
                for s in [at, left, right] {
                    namer.claim(false, s);
                }
            }
        }
    }
    for r in a.registers.iter().chain(&c0.store) {
        namer.claim(true, r);
    }
    for i in &a.instructions {
        if let Instruction::CheckSet { check, set, .. } = i {
            for r in check.iter().chain(set) {
                namer.claim(true, r);
            }
        }
    }
    let st = |s: &str| namer.atom(false, s);
    let reg = |r: &str| namer.atom(true, r);

    let mut ctx = Context::new();
    let mut add = |name: String, f: Formula| ctx.insert(&name, f).expect("fresh name");
    for (i, r) in c0.store.iter().enumerate() {
        add(format!("s{}", i + 1), reg(r));
    }
    add("final".into(), st(&a.final_state));
    for (i, instr) in a.instructions.iter().enumerate() {
        let axiom = match instr {
            Instruction::CheckSet {
                at,
                check,
                set,
                goto,
            } => {
                let body = Formula::imps(set.iter().map(|r| reg(r)), st(goto));
                Formula::imps(check.iter().map(|r| reg(r)).chain([body]), st(at))
            }
            Instruction::Split { at, left, right } => Formula::imps([st(left), st(right)], st(at)),
        };
        add(format!("ax{}", i + 1), axiom);
    }
    AutomatonEncoding {
        goal: st(&c0.state),
        context: ctx,
        renamed: namer.renamed.clone(),
    }
}

/// An implicational formula of order at most three, provable exactly when
/// `phi` is.
pub fn ipc_to_iipc3(phi: &Formula) -> Formula {
    let m = ipc_to_automaton(phi);
    automaton_to_formula(&m.automaton, &m.initial).formula()
}
