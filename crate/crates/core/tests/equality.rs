mod common;

use common::{p, reals};
use diffcalc::equality::{term_eq, terms_equal, EqConfig, EqError};
use diffcalc::suites;
use diffcalc::text::parse_type;
use diffcalc::TypingContext;

#[test]
fn equality_suites_hold() {
    for r in suites::equality_relation(17, 100).into_iter().chain(suites::lemmas(17, 100)) {
        assert!(r.passed(), "{}: {:?}", r.name, r.examples);
    }
}

#[test]
fn distinguishes_different_polynomials() {
    let ctx = reals(&["x"]);
    let o = term_eq(&ctx, &p("x * x"), &p("x * x (+) 1"), &EqConfig::default()).unwrap();
    assert!(!o.equal);
    assert!(o.witness.is_some());
}

#[test]
fn functions_compare_extensionally() {
    let ctx = TypingContext::new();
    assert!(terms_equal(&ctx, &p(r"\x:R. x"), &p(r"\y:R. y (+) 0")).unwrap());
    assert!(!terms_equal(&ctx, &p(r"\x:R. x"), &p(r"\x:R. x * x")).unwrap());
    let hof = p(r"\g:R->R. \x:R. g (g x)");
    let hof2 = p(r"\g:R->R. \x:R. (\u:R. g u) (g x)");
    assert!(terms_equal(&ctx, &hof, &hof2).unwrap());
    assert!(!terms_equal(&ctx, &hof, &p(r"\g:R->R. \x:R. g x")).unwrap());
}

#[test]
fn injections_compare_by_constructor() {
    let ctx = TypingContext::new();
    assert!(terms_equal(&ctx, &p("inl (1 (+) 1) as R+R"), &p("inl 2 as R+R")).unwrap());
    assert!(!terms_equal(&ctx, &p("inl 2 as R+R"), &p("inr 2 as R+R")).unwrap());
}

#[test]
fn different_types_are_never_equal() {
    let ctx = TypingContext::new().with("x", parse_type("(R,R)").unwrap());
    match term_eq(&ctx, &p("pi1 x"), &p("x"), &EqConfig::default()) {
        Err(EqError::TypeMismatch(..)) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn commutativity_with_tuple_variable() {
    let ctx = TypingContext::new().with("x", parse_type("(R,R)").unwrap());
    assert!(terms_equal(&ctx, &p("pi1 x (+) pi2 x"), &p("pi2 x (+) pi1 x")).unwrap());
}

#[test]
fn prims_obey_identities() {
    let ctx = reals(&["t"]);
    assert!(terms_equal(&ctx, &p("sin t * sin t (+) cos t * cos t"), &p("1")).unwrap());
    assert!(terms_equal(&ctx, &p("D{ sin y ; y @ t }"), &p("cos t")).unwrap());
}

#[test]
fn outcomes_are_seed_stable() {
    let ctx = TypingContext::new().with("h", parse_type("R->R").unwrap());
    let run = || {
        serde_json::to_string(&term_eq(&ctx, &p("h 1 (+) h 2"), &p("h 2 (+) h 3"), &EqConfig::with_seed(9)).unwrap())
            .unwrap()
    };
    assert_eq!(run(), run());
}

