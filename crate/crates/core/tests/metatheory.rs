use diffcalc::gen::{default_context, random_term, GenConfig};
use diffcalc::reduce::{normalize, step, Fuel, ReduceError};
use diffcalc::suites;
use diffcalc::typeck::typecheck;
use diffcalc::{alpha_eq, free_vars, fresh_var, substitute, Term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn term_from_seed(seed: u64, cfg: &GenConfig) -> (Term, diffcalc::Type) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_term(&mut rng, cfg, &default_context())
}

#[test]
fn metatheory_suites_hold() {
    for r in suites::metatheory(41, 220) {
        assert!(r.passed(), "{}: {:?}", r.name, r.examples);
        assert_eq!(r.cases, 220);
    }
}

#[test]
fn fix_never_gets_stuck() {
    let cfg = GenConfig { allow_fix: true, depth: 3, ..GenConfig::default() };
    let ctx = default_context();
    for seed in 0..300 {
        let (t, _) = term_from_seed(seed, &cfg);
        match normalize(&ctx, &t, Fuel::new(300)) {
            Ok(_) | Err(ReduceError::FuelExhausted { .. }) => {}
            Err(e) => panic!("{t}: {e}"),
        }
    }
}

#[test]
fn fuel_exhaustion_reports_progress() {
    let t = diffcalc::text::parse_term(r"fix (\f:R->R. f)").unwrap();
    match normalize(&Default::default(), &t, Fuel::new(50)) {
        Err(ReduceError::FuelExhausted { steps, .. }) => assert_eq!(steps, 50),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_terms_are_well_typed(seed in any::<u64>()) {
        let (t, ty) = term_from_seed(seed, &GenConfig::default());
        prop_assert_eq!(typecheck(&default_context(), &t).unwrap(), ty);
    }

    #[test]
    fn single_steps_preserve_types(seed in any::<u64>()) {
        let ctx = default_context();
        let (t, ty) = term_from_seed(seed, &GenConfig::default());
        if let Some(s) = step(&ctx, &t).unwrap() {
            let next = s.apply(&t).unwrap();
            prop_assert_eq!(typecheck(&ctx, &next).unwrap(), ty);
        }
    }

    #[test]
    fn substituting_an_absent_variable_is_identity(seed in any::<u64>()) {
        let (t, _) = term_from_seed(seed, &GenConfig::default());
        let x = fresh_var("absent", &free_vars(&t));
        prop_assert_eq!(substitute(&t, &x, &Term::num(1)), t);
    }

    #[test]
    fn renaming_a_free_variable_round_trips(seed in any::<u64>()) {
        let (t, _) = term_from_seed(seed, &GenConfig::default());
        if free_vars(&t).contains("a") {
            let z = fresh_var("z", &diffcalc::syntax::all_names(&t));
            let there = substitute(&t, "a", &Term::var(z.clone()));
            prop_assert!(!free_vars(&there).contains("a"));
            prop_assert!(alpha_eq(&substitute(&there, &z, &Term::var("a")), &t));
        }
    }

    #[test]
    fn normal_forms_are_fixed_points(seed in any::<u64>()) {
        let ctx = default_context();
        let (t, _) = term_from_seed(seed, &GenConfig { depth: 3, ..GenConfig::default() });
        let n = normalize(&ctx, &t, Fuel::default()).unwrap();
        prop_assert!(step(&ctx, &n).unwrap().is_none());
    }
}
