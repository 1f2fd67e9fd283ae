mod common;

use orderthree::formula::subformulas;
use orderthree::fragment::is_order_two_plus;
use orderthree::kripke::{countermodel_2plus, countermodel_search, KripkeModel};
use orderthree::{prove, Context, Formula};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(rng: &mut ChaCha8Rng) -> KripkeModel {
    let n = rng.gen_range(1..=5);
    let order: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(0.4))
        .collect();
    // Atoms appear at a state and then at everything above it.
    let mut val: Vec<Vec<&str>> = vec![Vec::new(); n];
    for atom in ["p", "q", "r"] {
        for c in 0..n {
            if rng.gen_bool(0.3) {
                for (d, vd) in val.iter_mut().enumerate() {
                    let above = d == c || reaches(&order, c, d);
                    if above && !vd.contains(&atom) {
                        vd.push(atom);
                    }
                }
            }
        }
    }
    KripkeModel::new(&order, val).unwrap()
}

fn reaches(order: &[(usize, usize)], c: usize, d: usize) -> bool {
    order
        .iter()
        .any(|&(a, b)| a == c && (b == d || reaches(order, b, d)))
}

/// Formulas built from literals with order at most two when literals
/// count as atoms.
fn two_plus_strategy() -> impl Strategy<Value = Formula> {
    let lit = prop_oneof![
        Just(Formula::var("p")),
        Just(Formula::var("q")),
        Just(Formula::var("r")),
        Just(Formula::negation(Formula::var("p"))),
        Just(Formula::negation(Formula::var("q"))),
        Just(Formula::negation(Formula::var("r"))),
    ];
    let arg = (proptest::collection::vec(lit.clone(), 0..3), lit.clone())
        .prop_map(|(args, t)| Formula::imps(args, t));
    (proptest::collection::vec(arg, 0..4), lit).prop_map(|(args, t)| Formula::imps(args, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn forcing_is_monotone(seed in any::<u64>(), f in common::formula_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng);
        for g in subformulas(&f) {
            for c in 0..m.len() {
                for d in 0..m.len() {
                    if m.le(c, d) && m.forces(c, &g) {
                        prop_assert!(m.forces(d, &g));
                    }
                }
            }
        }
        prop_assert_eq!(m.to_string().parse::<KripkeModel>().unwrap(), m);
    }

    #[test]
    fn found_countermodels_refute(f in common::formula_strategy()) {
        let empty = Context::new();
        if let Some((m, c)) = countermodel_search(&empty, &f, 3) {
            prop_assert!(!m.forces(c, &f));
            prop_assert!(!prove(&empty, &f).is_provable());
        }
    }

    #[test]
    fn depth_two_countermodels(f in two_plus_strategy()) {
        prop_assert!(is_order_two_plus(&f));
        let provable = prove(&Context::new(), &f).is_provable();
        match countermodel_2plus(&f).unwrap() {
            None => prop_assert!(provable),
            Some((m, c)) => {
                prop_assert!(!provable);
                prop_assert!(!m.forces(c, &f));
                prop_assert!(m.len() <= f.length());
                prop_assert!(m.depth() <= 2);
                prop_assert!((0..m.len()).filter(|&d| d != c).all(|d| m.is_maximal(d)));
            }
        }
    }
}
