mod common;

use common::p;
use diffcalc::discrete::{derive_fn, discrete_normalize, discrete_step, from_term, to_term, DRule, DTerm};
use diffcalc::equality::terms_equal;
use diffcalc::reduce::Fuel;
use diffcalc::{suites, Type, TypingContext};

fn d(s: &str) -> DTerm {
    from_term(&p(s)).unwrap()
}

fn apply_derive(f: &str) -> DTerm {
    let df = derive_fn(&TypingContext::new(), &d(f)).unwrap();
    DTerm::app(DTerm::app(df, DTerm::var("a")), DTerm::var("dd"))
}

#[test]
fn difference_rules() {
    let at = (DTerm::var("x"), DTerm::var("dx"));
    let c = DTerm::dder(DTerm::num(4), "y", at.0.clone(), at.1.clone());
    let (next, step) = discrete_step(&c).unwrap().unwrap();
    assert_eq!((next, step.rule), (DTerm::num(0), DRule::DConst));
    let v = DTerm::dder(DTerm::var("y"), "y", at.0.clone(), at.1.clone());
    assert_eq!(discrete_step(&v).unwrap().unwrap().0, DTerm::var("dx"));
}

#[test]
fn derive_examples() {
    let ctx = common::reals(&["a", "dd"]);
    for (f, want) in [
        (r"\x:R. x", "dd"),
        (r"\x:R. x * x", "(a (+) dd) * (a (+) dd) (-) a * a"),
        (r"\x:R. 3", "0"),
    ] {
        let (n, _) = discrete_normalize(&apply_derive(f), Fuel::default()).unwrap();
        assert!(terms_equal(&ctx, &to_term(&n), &p(want)).unwrap(), "{f}: {n}");
    }
}

#[test]
fn application_rule_shape() {
    let (n, trace) = discrete_normalize(&apply_derive(r"\x:R. x"), Fuel::default()).unwrap();
    assert_eq!(n, DTerm::sub(DTerm::add(DTerm::var("a"), DTerm::var("dd")), DTerm::var("a")));
    assert!(trace.iter().any(|s| s.rule == DRule::DApp));
}

#[test]
fn function_typed_targets() {
    let ctx = common::reals(&["a", "dd", "u"]);
    let (n, _) = discrete_normalize(&apply_derive(r"\x:R. \w:R. w * x"), Fuel::default()).unwrap();
    assert!(matches!(n, DTerm::Lam { .. }));
    let at_u = to_term(&DTerm::app(n, DTerm::var("u")));
    assert!(terms_equal(&ctx, &at_u, &p("u * dd")).unwrap());
}

#[test]
fn defining_equation_suite() {
    let r = suites::discrete_defining_equation(31, 100);
    assert!(r.passed(), "{:?}", r.examples);
}

#[test]
fn rejects_calculus_constructs() {
    assert!(from_term(&p("D{ y ; y @ 1 }")).is_err());
    assert!(diffcalc::discrete::typecheck(&TypingContext::new(), &DTerm::lam("x", Type::real(), DTerm::var("q"))).is_err());
}
