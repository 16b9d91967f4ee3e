#![allow(dead_code)]

use std::collections::HashMap;

use diffcalc::embed::embed;
use diffcalc::real::{eval, PrimTable};
use diffcalc::reduce::normalize;
use diffcalc::text::parse_term;
use diffcalc::{Term, Type, TypingContext};

pub fn p(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn reals(names: &[&str]) -> TypingContext {
    names.iter().fold(TypingContext::new(), |c, x| c.with(*x, Type::real()))
}

/// Numeric value of each base component of `t`, with the given variables bound.
pub fn eval_parts(t: &Term, env: &[(&str, f64)]) -> Vec<f64> {
    let ctx = reals(&env.iter().map(|(k, _)| *k).collect::<Vec<_>>());
    let n = normalize(&ctx, t, Default::default()).unwrap();
    let env: HashMap<String, f64> = env.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    fn go(t: &Term, env: &HashMap<String, f64>, out: &mut Vec<f64>) {
        match t {
            Term::Tuple(items) => items.iter().for_each(|i| go(i, env, out)),
            _ => out.push(eval(&embed(t, PrimTable::shared()).unwrap(), env, PrimTable::shared()).unwrap()),
        }
    }
    let mut out = Vec::new();
    go(&n, &env, &mut out);
    out
}

pub fn eval_num(t: &Term, env: &[(&str, f64)]) -> f64 {
    let v = eval_parts(t, env);
    assert_eq!(v.len(), 1, "{t} is not base-typed");
    v[0]
}

pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = (a + b) / 2.0;
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = rule(f, a, fa, m, fm);
        let (rm, frm, right) = rule(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = rule(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// A one-variable numeric function from a base-typed term in `var`.
pub fn as_fn(t: &Term, var: &str) -> impl Fn(f64) -> f64 {
    let ctx = reals(&[var]);
    let n = normalize(&ctx, t, Default::default()).unwrap();
    let e = embed(&n, PrimTable::shared()).unwrap();
    let var = var.to_string();
    move |x| eval(&e, &HashMap::from([(var.clone(), x)]), PrimTable::shared()).unwrap()
}

/// Finite-difference and quadrature cross-checks on random polynomials.
/// Returns the number of disagreements for each oracle.
pub fn numeric_cross_checks(seed: u64, cases: usize) -> (usize, usize) {
    use diffcalc::gen::{random_poly_body, random_polynomial};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut fd_bad, mut quad_bad) = (0, 0);
    for _ in 0..cases {
        let n = rng.gen_range(1..=2);
        let body = random_poly_body(&mut rng, "y", n, 1, 3);
        let names = ["u1", "u2"];
        let point = if n == 1 {
            Term::var("u1")
        } else {
            Term::tuple(names.iter().map(|x| Term::var(*x)).collect())
        };
        let vals: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let env: Vec<(&str, f64)> = names.iter().copied().zip(vals.iter().copied()).collect();
        let grad = eval_parts(&Term::der(body.clone(), "y", point.clone()), &env);
        let f = diffcalc::syntax::substitute(&body, "y", &point);
        for (i, g) in grad.iter().enumerate() {
            let partial = |x: f64| {
                let mut e = env.clone();
                e[i].1 = x;
                eval_num(&f, &e)
            };
            if !rel_close(*g, central_diff(partial, vals[i], 1e-4), 1e-5) {
                fd_bad += 1;
            }
        }

        let integrand = random_polynomial(&mut rng, &[Term::var("x"), Term::var("x")], 4);
        let (lo, hi) = (rng.gen_range(-3..=1), rng.gen_range(-1..=3));
        let sym = eval_num(&Term::int(Term::num(lo), Term::num(hi), integrand.clone(), "x"), &[]);
        let quad = simpson(&as_fn(&integrand, "x"), lo as f64, hi as f64, 1e-10);
        if !rel_close(sym, quad, 1e-9) {
            quad_bad += 1;
        }
    }
    (fd_bad, quad_bad)
}
