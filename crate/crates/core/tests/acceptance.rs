mod common;

use std::time::{Duration, Instant};

use common::{eval_num, numeric_cross_checks, p, reals, rel_close};
use diffcalc::builtins::lookup;
use diffcalc::discrete::{self, derive_fn, eval_closed, DTerm};
use diffcalc::embed::simplify;
use diffcalc::equality::{nf_eq, term_eq, terms_equal, EqConfig};
use diffcalc::gen::random_discrete_poly;
use diffcalc::real::PrimTable;
use diffcalc::reduce::{normalize, Fuel};
use diffcalc::suites::{self, SuiteReport};
use diffcalc::theorems::{
    ad_gradient, chain_rule_sides, derive_incremental, derive_n, increment_term, newton_leibniz_sides, power_mul,
    taylor_expand,
};
use diffcalc::typeck::typecheck;
use diffcalc::{Term, TypingContext};
use rand::SeedableRng;

const SEED: u64 = 0x5eed;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn suites_pass(reports: &[SuiteReport], min_cases: usize) -> Outcome {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed() || r.cases < min_cases)
        .map(|r| format!("{}: {} failures, {} inconclusive, {:?}", r.name, r.failures, r.inconclusive, r.examples))
        .collect();
    let summary: Vec<String> = reports.iter().map(|r| format!("{} {}/{}", r.name, r.cases - r.failures, r.cases)).collect();
    if bad.is_empty() {
        outcome(true, summary.join(", "))
    } else {
        outcome(false, bad.join("; "))
    }
}

fn eq(ctx: &TypingContext, a: &Term, b: &Term) -> bool {
    terms_equal(ctx, a, b).unwrap_or(false)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ctx = TypingContext::new();
    let f = lookup("f").unwrap();
    let body = Term::app(f.clone(), Term::var("y"));
    let (lhs, rhs) = newton_leibniz_sides(&ctx, &body, "y", &p("(0,0)"), &p("(2,3)"));
    let nf = normalize(&ctx, &lhs, Fuel::default()).unwrap();
    let ty = typecheck(&ctx, &lhs).unwrap();
    let cfg = EqConfig::default();
    let golden = nf_eq(&ctx, &nf, &p("(5,6,3)"), &ty, &cfg).unwrap().is_none();
    let rhs_nf = normalize(&ctx, &rhs, Fuel::default()).unwrap();
    let sides = nf_eq(&ctx, &nf, &rhs_nf, &ty, &cfg).unwrap().is_none();
    let fast = start.elapsed() < Duration::from_secs(1);
    let shown = simplify(&ctx, &nf, PrimTable::shared());
    outcome(golden && sides && fast, format!("{shown} in {:?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let ctx = TypingContext::new();
    let t = p("((1,4),(2,5),(3,6)) * (7,8,9)");
    let nf = normalize(&ctx, &t, Fuel::default()).unwrap();
    let ty = typecheck(&ctx, &t).unwrap();
    let ok = nf_eq(&ctx, &nf, &p("(50,122)"), &ty, &EqConfig::default()).unwrap().is_none();
    let shown = simplify(&ctx, &nf, PrimTable::shared()).to_string();
    outcome(ok && shown == "(50,122)", shown)
}

fn criterion_3() -> Outcome {
    let ctx = reals(&["r1", "r2", "r3", "r4"]);
    let (f, g) = (lookup("f").unwrap(), lookup("g").unwrap());
    let (lhs, rhs) = chain_rule_sides(&ctx, &f, &g, &p("(r3,r4)"), &p("(r1,r2)"));
    let canon = p("(r1 (+) 2 * r2, r4 * r1 (+) (r3 (+) 2 * r4) * r2, r2)");
    let ok = eq(&ctx, &lhs, &rhs) && eq(&ctx, &lhs, &canon) && eq(&ctx, &rhs, &canon);
    let shown = simplify(&ctx, &normalize(&ctx, &lhs, Fuel::default()).unwrap(), PrimTable::shared());
    outcome(ok, shown.to_string())
}

fn criterion_4() -> Outcome {
    let ctx = reals(&["a", "b"]);
    let grad = ad_gradient(&ctx, &lookup("magSqr").unwrap(), &p("(a,b)")).unwrap();
    outcome(eq(&ctx, &grad, &p("(2 * a, 2 * b)")), grad.to_string())
}

fn criterion_5() -> Outcome {
    let ctx = reals(&["C1", "C2", "dr", "dth"]);
    let f = lookup("taylor_f").unwrap();
    let exp = taylor_expand(&ctx, &f, &p("(0,0)"), &p("(C1,C2)"), 2).unwrap();
    let whole = eq(&ctx, exp.term(), &Term::app(f.clone(), p("(C1,C2)")));
    let second = power_mul(
        &ctx,
        &Term::app(derive_n(&ctx, &f, 2).unwrap(), p("(0,0)")),
        &p("(C1,C2) (-) (0,0)"),
        2,
    )
    .unwrap();
    let second_ok = eq(&ctx, &second, &p("(4 * C1 * C2, 6 * C1 * C1)"));
    let p2c = lookup("polar2cartesian").unwrap();
    let exp2 = taylor_expand(&ctx, &p2c, &p("(1,0)"), &p("(1 (+) dr, dth)"), 2).unwrap();
    let approx = p("(1 (+) dr (-) 1/2 * dth * dth, dth (+) dr * dth)");
    let polar = eq(&ctx, exp2.term(), &approx);
    let shown = simplify(&ctx, &normalize(&ctx, exp2.term(), Fuel::default()).unwrap(), PrimTable::shared());
    outcome(
        whole && second_ok && polar,
        format!("order-2 taylor_f exact: {whole}, second-order term: {second_ok}, polar2cartesian: {shown}"),
    )
}

fn criterion_6() -> Outcome {
    let ctx = reals(&["x1", "x2", "d"]);
    let inc = derive_incremental(&ctx, &lookup("average").unwrap(), &p("(x1,x2)"), &p("(d,0)")).unwrap();
    outcome(eq(&ctx, &inc, &p("d * 1/2")), inc.to_string())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let reports = suites::metatheory(SEED, 250);
    let mut o = suites_pass(&reports, 200);
    let took = start.elapsed();
    if took >= Duration::from_secs(60) {
        o.ok = false;
    }
    o.detail = format!("{} in {took:?}", o.detail);
    o
}

fn criterion_8() -> Outcome {
    let mut reports = Vec::new();
    reports.push(suites::newton_leibniz(SEED, 100));
    reports.push(suites::chain_rule(SEED, 100));
    reports.push(suites::taylor(SEED, 100));
    reports.extend(suites::laws(SEED, 100));
    reports.extend(suites::lemmas(SEED, 100));
    let mut o = suites_pass(&reports, 100);
    let (fd, quad) = numeric_cross_checks(SEED, 100);
    if fd + quad > 0 {
        o.ok = false;
    }
    o.detail = format!("{}; finite-difference mismatches {fd}, quadrature mismatches {quad}", o.detail);
    o
}

fn criterion_9() -> Outcome {
    let mut o = suites_pass(&[suites::discrete_defining_equation(SEED, 100)], 100);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let ctx = reals(&["a", "d"]);
    let mut bad = 0;
    for i in 0..100 {
        let f = random_discrete_poly(&mut rng);
        let applied = DTerm::app(DTerm::app(derive_fn(&TypingContext::new(), &f).unwrap(), DTerm::var("a")), DTerm::var("d"));
        let (a, d) = (0.37 * i as f64 - 11.0, 1.5 - 0.03 * i as f64);
        let env = [("a".to_string(), a), ("d".to_string(), d)].into_iter().collect();
        let discrete_val = eval_closed(&applied, Fuel::default(), &env).unwrap();
        let analytic = increment_term(&ctx, &discrete::to_term(&f), &p("a"), &p("d"));
        let analytic_val = eval_num(&analytic, &[("a", a), ("d", d)]);
        if !rel_close(discrete_val, analytic_val, 1e-9) {
            bad += 1;
        }
    }
    if bad > 0 {
        o.ok = false;
    }
    o.detail = format!("{}; analytic vs discrete mismatches {bad}/100", o.detail);
    o
}

fn criterion_10() -> Outcome {
    suites_pass(&[suites::round_trip(SEED, 500)], 500)
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Newton-Leibniz golden case", criterion_1),
        ("matrix multiplication golden case", criterion_2),
        ("chain rule golden case", criterion_3),
        ("gradient of magSqr", criterion_4),
        ("Taylor golden cases", criterion_5),
        ("incremental average", criterion_6),
        ("metatheory property suites", criterion_7),
        ("theorem property suites", criterion_8),
        ("discrete correspondence", criterion_9),
        ("parse/print round trip", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.ok { "PASS" } else { "FAIL" }, name, o.detail);
        if !o.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn term_eq_examples() {
    let ctx = TypingContext::new();
    let f = lookup("f").unwrap();
    let (lhs, _) = newton_leibniz_sides(&ctx, &Term::app(f.clone(), Term::var("y")), "y", &p("(0,0)"), &p("(2,3)"));
    let rhs = Term::sub(Term::app(f.clone(), p("(2,3)")), Term::app(f, p("(0,0)")));
    assert!(term_eq(&ctx, &lhs, &rhs, &EqConfig::default()).unwrap().equal);
    let pair = TypingContext::new().with("x", diffcalc::text::parse_type("(R,R)").unwrap());
    assert!(terms_equal(&pair, &p("pi1 x (+) pi2 x"), &p("pi2 x (+) pi1 x")).unwrap());
}
