//! Decision procedures and reductions for intuitionistic propositional
//! logic, organised around the order of formulas: proof search with proof
//! terms, monotonic automata, polynomial reductions between them, and
//! Kripke countermodels.

pub mod automata;
pub mod bitset;
pub mod error;
pub mod formula;
pub mod fragment;
pub mod kripke;
pub mod prover;
pub mod reductions;
pub mod term;

pub use automata::{accepts, Configuration, Instruction, MonotonicAutomaton};
pub use error::{Error, Result};
pub use formula::{parse_context, parse_formula, Context, Formula};
pub use kripke::{countermodel_2plus, countermodel_search, KripkeModel};
pub use prover::{prove, prove_iipc, Outcome, ProofSearchResult};
pub use term::{parse_term, typecheck, Term};
