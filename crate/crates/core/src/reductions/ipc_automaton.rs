//! Proof search as a monotonic automaton: registers hold hypotheses, states
//! hold goals, and each proof-search step becomes a family of instructions.

use crate::automata::{Configuration, Instruction, MonotonicAutomaton};
use crate::formula::{targets, traces, Formula, SubformulaTable};

pub const FINAL_STATE: &str = "fin";

/// The automaton of a formula together with the naming of its subformulas.
#[derive(Clone, Debug)]
pub struct IpcAutomaton {
    pub automaton: MonotonicAutomaton,
    /// `<state of the formula, {}>`.
    pub initial: Configuration,
    table: SubformulaTable,
}

fn state(id: usize) -> String {
    format!("q{id}")
}

fn register(id: usize) -> String {
    format!("r{id}")
}

impl IpcAutomaton {
    pub fn state_of(&self, f: &Formula) -> Option<String> {
        self.table.id(f).map(state)
    }

    pub fn register_of(&self, f: &Formula) -> Option<String> {
        self.table.id(f).map(register)
    }

    /// The configuration standing for `ctx |- goal`, when all formulas are
    /// subformulas of the source.
    pub fn judgement<'a, I>(&self, ctx: I, goal: &Formula) -> Option<Configuration>
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let store = ctx
            .into_iter()
            .map(|f| self.register_of(f))
            .collect::<Option<_>>()?;
        Some(Configuration {
            state: self.state_of(goal)?,
            store,
        })
    }
}

struct Builder {
    states: Vec<String>,
    instructions: Vec<Instruction>,
}

impl Builder {
    fn aux(&mut self, name: String) -> String {
        self.states.push(name.clone());
        name
    }

    /// `from: check {check} goto` a universal split over `items`; with no
    /// items the branch is finished, with one it continues directly.
    fn check_then_split(&mut self, from: &str, check: &str, items: &[String], prefix: &str) {
        let entry = match items {
            [] => FINAL_STATE.to_string(),
            [only] => only.clone(),
            _ => format!("{prefix}_1"),
        };
        self.instructions
            .push(Instruction::check_set(from, [check], [], &entry));
        if items.len() < 2 {
            return;
        }
        let m = items.len();
        for j in 1..m {
            let here = self.aux(format!("{prefix}_{j}"));
            let right = if j + 1 == m {
                items[m - 1].clone()
            } else {
                format!("{prefix}_{}", j + 1)
            };
            self.instructions
                .push(Instruction::split(&here, &items[j - 1], &right));
        }
    }
}

/// Builds the automaton whose configuration `<q, {}>` accepts exactly when
/// `phi` is provable.
///
/// Besides conjunction, implication and the three elimination families,
/// a disjunction goal may jump to either disjunct; without this the
/// automaton could not prove `p -> p \/ q`.
pub fn ipc_to_automaton(phi: &Formula) -> IpcAutomaton {
    let mut table = SubformulaTable::default();
    table.intern(phi);
    let n = table.len();
    let mut b = Builder {
        states: (0..n).map(state).collect(),
        instructions: Vec::new(),
    };
    b.states.push(FINAL_STATE.to_string());
    let id = |f: &Formula| table.id(f).expect("subformula");
    for (phi_id, goal) in table.iter() {
        let here = state(phi_id);
        match goal {
            Formula::Conj(t, s) => {
                b.instructions
                    .push(Instruction::split(&here, &state(id(t)), &state(id(s))))
            }
            Formula::Impl(t, s) => b.instructions.push(Instruction::check_set(
                &here,
                [],
                [register(id(t)).as_str()],
                &state(id(s)),
            )),
            _ => {}
        }
        if !(goal.is_atom() || goal.is_disj()) {
            continue;
        }
        if let Formula::Disj(t, s) = goal {
            for side in [t, s] {
                b.instructions
                    .push(Instruction::check_set(&here, [], [], &state(id(side))));
            }
        }
        for (psi_id, psi) in table.iter() {
            let mut k = 0;
            for alpha in targets(psi) {
                let usable = (alpha == *goal && goal.is_atom())
                    || alpha == Formula::Falsum
                    || alpha.is_disj();
                if !usable {
                    continue;
                }
                for trace in traces(&alpha, psi) {
                    k += 1;
                    let prefix = format!("a{phi_id}_{psi_id}_{k}");
                    let mut items: Vec<String> = trace.iter().map(|r| state(id(r))).collect();
                    let disjuncts = match &alpha {
                        Formula::Disj(l, r) if !(alpha == *goal && goal.is_atom()) => {
                            Some((l.clone(), r.clone()))
                        }
                        _ => None,
                    };
                    if let Some((l, r)) = &disjuncts {
                        for (side, reg) in [("l", l), ("r", r)] {
                            let s = b.aux(format!("{prefix}_{side}"));
                            b.instructions.push(Instruction::check_set(
                                &s,
                                [],
                                [register(id(reg)).as_str()],
                                &here,
                            ));
                            items.push(s);
                        }
                    }
                    b.check_then_split(&here, &register(psi_id), &items, &prefix);
                }
            }
        }
    }
    let automaton = MonotonicAutomaton {
        states: b.states,
        registers: (0..n).map(register).collect(),
        final_state: FINAL_STATE.to_string(),
        instructions: b.instructions,
    };
    let initial = Configuration {
        state: state(id(phi)),
        store: Default::default(),
    };
    IpcAutomaton {
        automaton,
        initial,
        table,
    }
}
