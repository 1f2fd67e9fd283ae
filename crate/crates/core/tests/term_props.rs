mod common;

use orderthree::term::{
    alpha_eq, free_vars, normalize_with, reduce_step, reduce_step_with, subst_term, Strategy,
    DEFAULT_STEP_LIMIT,
};
use orderthree::{parse_term, prove, typecheck, Context, Term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64) -> (Term, orderthree::Formula) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::TermGen::new(&mut rng).sample(4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_terms_are_well_typed(seed in any::<u64>()) {
        let (t, ty) = sample(seed);
        prop_assert_eq!(typecheck(&common::term_context(), &t).unwrap(), ty);
    }

    #[test]
    fn subject_reduction(seed in any::<u64>()) {
        let ctx = common::term_context();
        let (mut t, ty) = sample(seed);
        for strategy in [Strategy::LeftmostOutermost, Strategy::RightmostInnermost] {
            let mut steps = 0;
            while let Some(next) = reduce_step_with(&ctx, &t, strategy) {
                prop_assert_eq!(typecheck(&ctx, &next).unwrap(), ty.clone());
                t = next;
                steps += 1;
                prop_assert!(steps <= DEFAULT_STEP_LIMIT);
            }
        }
    }

    #[test]
    fn strategies_agree(seed in any::<u64>()) {
        let ctx = common::term_context();
        let (t, _) = sample(seed);
        let (a, _) = normalize_with(&ctx, &t, Strategy::LeftmostOutermost, DEFAULT_STEP_LIMIT).unwrap();
        let (b, _) = normalize_with(&ctx, &t, Strategy::RightmostInnermost, DEFAULT_STEP_LIMIT).unwrap();
        prop_assert!(alpha_eq(&a, &b), "{} vs {}", a, b);
    }

    #[test]
    fn substitution_free_variables(seed in any::<u64>(), x in prop_oneof![Just("a"), Just("b"), Just("z")]) {
        let (m, _) = sample(seed);
        let (n, _) = sample(seed.wrapping_add(1));
        let got = free_vars(&subst_term(&m, x, &n));
        let mut bound = free_vars(&m);
        bound.remove(x);
        bound.extend(free_vars(&n));
        prop_assert!(got.is_subset(&bound));
    }

    #[test]
    fn long_normal_forms_are_normal(f in common::formula_strategy()) {
        let empty = Context::new();
        if let Some(w) = prove(&empty, &f).witness() {
            prop_assert!(reduce_step(&empty, w).is_none());
        }
    }
}

#[test]
fn printed_terms_reparse() {
    for seed in 0..200 {
        let (t, _) = sample(seed);
        let back = parse_term(&t.to_string()).unwrap();
        assert!(alpha_eq(&back, &t), "{t}");
    }
}
