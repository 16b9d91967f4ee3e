mod common;

use common::{as_fn, central_diff, numeric_cross_checks, p, reals, rel_close, simpson};
use diffcalc::builtins::lookup;
use diffcalc::equality::EqConfig;
use diffcalc::suites;
use diffcalc::theorems::{check_taylor, fun_derive, Verdict};
use diffcalc::{Term, TypingContext};

#[test]
fn theorem_suites_hold() {
    let seed = 23;
    let mut reports = vec![
        suites::newton_leibniz(seed, 100),
        suites::chain_rule(seed, 100),
        suites::taylor(seed, 100),
        suites::incremental(seed, 100),
    ];
    reports.extend(suites::laws(seed, 100));
    for r in reports {
        assert!(r.passed(), "{}: {:?}", r.name, r.examples);
    }
}

#[test]
fn truncated_taylor_is_detected() {
    let ctx = reals(&["a", "b"]);
    let f = p(r"\x:(R,R). pi1 x * pi1 x * pi2 x");
    let cfg = EqConfig::default();
    assert_eq!(check_taylor(&ctx, &f, &p("(1,2)"), &p("(a,b)"), 3, &cfg).unwrap().verdict, Verdict::Holds);
    assert_eq!(check_taylor(&ctx, &f, &p("(1,2)"), &p("(a,b)"), 2, &cfg).unwrap().verdict, Verdict::Fails);
}

#[test]
fn polar_jacobian_at_unit() {
    let ctx = TypingContext::new();
    let d = fun_derive(&ctx, &lookup("polar2cartesian").unwrap()).unwrap();
    let j = Term::app(d, p("(1,0)"));
    assert!(diffcalc::equality::terms_equal(&ctx, &j, &p("((1,0),(0,1))")).unwrap());
}

#[test]
fn oracles_are_sound() {
    let quartic = |x: f64| x * x * x * x;
    assert!(rel_close(simpson(&quartic, -1.0, 2.0, 1e-10), 33.0 / 5.0, 1e-12));
    assert!(rel_close(simpson(&f64::sin, 0.0, std::f64::consts::PI, 1e-10), 2.0, 1e-9));
    assert!(rel_close(central_diff(quartic, 1.5, 1e-4), 4.0 * 1.5f64.powi(3), 1e-7));
    let g = as_fn(&p("x * x * x"), "x");
    assert!(rel_close(g(2.0), 8.0, 1e-15));
}

#[test]
fn numeric_cross_checks_agree() {
    assert_eq!(numeric_cross_checks(99, 60), (0, 0));
}

#[test]
fn derivative_of_prims_matches_finite_differences() {
    let ctx = reals(&["t"]);
    let d = diffcalc::reduce::normalize(&ctx, &p("D{ sin (y * y) (+) exp y ; y @ t }"), Default::default()).unwrap();
    let f = as_fn(&d, "t");
    let g = |x: f64| (x * x).sin() + x.exp();
    for x in [-1.3, 0.2, 0.9, 2.5] {
        assert!(rel_close(f(x), central_diff(g, x, 1e-5), 1e-5));
    }
}
