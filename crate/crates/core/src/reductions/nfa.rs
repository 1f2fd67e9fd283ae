//! Finite automata run by a nondeterministic monotonic automaton, one
//! register per (position, state).

use crate::automata::{Configuration, Instruction, MonotonicAutomaton};
use crate::error::{Error, Result};

/// A finite automaton over states `0..states`, started in state 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAutomaton {
    pub states: usize,
    pub finals: Vec<usize>,
    /// `(from, symbol, to)`.
    pub transitions: Vec<(usize, String, usize)>,
}

impl FiniteAutomaton {
    /// Direct subset simulation.
    pub fn accepts_word<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut current = vec![false; self.states];
        if self.states == 0 {
            return false;
        }
        current[0] = true;
        for a in word {
            let mut next = vec![false; self.states];
            for (from, sym, to) in &self.transitions {
                if current[*from] && sym == a.as_ref() {
                    next[*to] = true;
                }
            }
            current = next;
        }
        self.finals.iter().any(|&k| current[k])
    }
}

fn reg(t: usize, i: usize) -> String {
    format!("r{t}_{i}")
}

fn state(t: usize) -> String {
    format!("q{t}")
}

/// The automaton with states `q0..qn, f` and registers `r{t}_{i}` that
/// accepts `<q0, {r0_0}>` exactly when the word is accepted.
pub fn nfa_to_automaton<S: AsRef<str>>(
    fa: &FiniteAutomaton,
    word: &[S],
) -> Result<(MonotonicAutomaton, Configuration)> {
    if fa.states == 0 {
        return Err(Error::Invalid("finite automaton has no states".into()));
    }
    let bad = |i: usize| i >= fa.states;
    if fa.finals.iter().any(|&k| bad(k))
        || fa.transitions.iter().any(|(a, _, b)| bad(*a) || bad(*b))
    {
        return Err(Error::Invalid(
            "transition or final state out of range".into(),
        ));
    }
    let n = word.len();
    let mut instructions = Vec::new();
    for (t, a) in word.iter().enumerate() {
        for (i, sym, j) in &fa.transitions {
            if sym == a.as_ref() {
                instructions.push(Instruction::check_set(
                    &state(t),
                    [reg(t, *i).as_str()],
                    [reg(t + 1, *j).as_str()],
                    &state(t + 1),
                ));
            }
        }
    }
    for &k in &fa.finals {
        instructions.push(Instruction::check_set(
            &state(n),
            [reg(n, k).as_str()],
            [],
            "f",
        ));
    }
    let automaton = MonotonicAutomaton {
        states: (0..=n).map(state).chain(["f".to_string()]).collect(),
        registers: (0..=n)
            .flat_map(|t| (0..fa.states).map(move |i| reg(t, i)))
            .collect(),
        final_state: "f".into(),
        instructions,
    };
    let init = Configuration::new(&state(0), [reg(0, 0).as_str()]);
    Ok((automaton, init))
}
