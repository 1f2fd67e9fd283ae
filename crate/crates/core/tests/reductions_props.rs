mod common;

use orderthree::automata::accepts;
use orderthree::formula::order;
use orderthree::fragment::{classify, is_order_two_plus};
use orderthree::reductions::classical::{classical_order3, truth_table_equivalent};
use orderthree::reductions::cnf::{cnf_to_conp_context, cnf_to_np_formula, Cnf3, Literal};
use orderthree::reductions::nfa::{nfa_to_automaton, FiniteAutomaton};
use orderthree::reductions::{automaton_to_formula, ipc_to_automaton, ipc_to_iipc3};
use orderthree::{prove, prove_iipc, Context, Formula};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> Cnf3 {
    let names = ["p", "q", "r", "s", "t"];
    Cnf3::new(
        (0..clauses)
            .map(|_| {
                [(); 3].map(|_| Literal {
                    var: names[rng.gen_range(0..vars)].to_string(),
                    positive: rng.gen_bool(0.5),
                })
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn automaton_encoding_has_order_three(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, c) = common::random_automaton(&mut rng, 5, 6);
        let enc = automaton_to_formula(&a, &c);
        for ax in enc.context.formulas() {
            prop_assert!(order(ax).unwrap() <= 2);
        }
        let f = enc.formula();
        prop_assert!(order(&f).unwrap() <= 3);
        prop_assert_eq!(
            prove_iipc(&enc.context, &enc.goal).unwrap().is_provable(),
            accepts(&a, &c).accepted
        );
    }

    #[test]
    fn reductions_preserve_provability(f in common::formula_strategy()) {
        let direct = prove(&Context::new(), &f).is_provable();
        let m = ipc_to_automaton(&f);
        prop_assert_eq!(accepts(&m.automaton, &m.initial).accepted, direct);
        let psi = ipc_to_iipc3(&f);
        prop_assert!(order(&psi).unwrap() <= 3);
        prop_assert_eq!(prove_iipc(&Context::new(), &psi).unwrap().is_provable(), direct);
    }

    #[test]
    fn clause_encodings_decide_satisfiability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=5);
        let psi = random_cnf(&mut rng, vars, n);
        let sat = psi.is_satisfiable();
        let np = cnf_to_np_formula(&psi).unwrap();
        prop_assert!(classify(&np).in_t3m);
        prop_assert_eq!(prove(&Context::new(), &np).is_provable(), sat);
        let (ctx, goal) = cnf_to_conp_context(&psi).unwrap();
        prop_assert!(ctx.formulas().all(is_order_two_plus));
        prop_assert_eq!(prove(&ctx, &goal).is_provable(), !sat);
    }

    #[test]
    fn finite_automata_runs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = rng.gen_range(1..=4);
        let fa = FiniteAutomaton {
            states,
            finals: (0..states).filter(|_| rng.gen_bool(0.4)).collect(),
            transitions: (0..rng.gen_range(0..8))
                .map(|_| {
                    let sym = if rng.gen_bool(0.5) { "a" } else { "b" };
                    (rng.gen_range(0..states), sym.to_string(), rng.gen_range(0..states))
                })
                .collect(),
        };
        let word: Vec<&str> = (0..rng.gen_range(0..6)).map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }).collect();
        let (a, c) = nfa_to_automaton(&fa, &word).unwrap();
        prop_assert_eq!(accepts(&a, &c).accepted, fa.accepts_word(&word));
    }
}

#[test]
fn classical_rewrite_is_equivalent_on_small_formulas() {
    let atoms: Vec<Formula> = ["p", "q", "r", "s"]
        .iter()
        .map(|v| Formula::var(v))
        .collect();
    let corpus = common::implicational_up_to(9, &atoms);
    assert!(corpus.len() > 10_000);
    for phi in corpus {
        let out = classical_order3(&phi).unwrap();
        assert!(order(&out).unwrap() <= 3, "{phi}");
        assert!(truth_table_equivalent(&phi, &out), "{phi} vs {out}");
    }
}
