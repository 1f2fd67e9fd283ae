//! Translations between formulas, automata, machines and clause sets.

pub mod automaton_formula;
pub mod classical;
pub mod cnf;
pub mod ipc_automaton;
pub mod lba;
pub mod nfa;

pub use automaton_formula::{automaton_to_formula, ipc_to_iipc3, AutomatonEncoding};
pub use classical::classical_order3;
pub use cnf::{cnf_to_conp_context, cnf_to_np_formula, Cnf3, Literal};
pub use ipc_automaton::{ipc_to_automaton, IpcAutomaton};
pub use lba::{lba_to_automaton, LbaDescription};
pub use nfa::{nfa_to_automaton, FiniteAutomaton};
