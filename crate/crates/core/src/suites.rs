//! Randomized property suites over the reducer, equality and theorem
//! checkers. Each suite is deterministic in its seed.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discrete;
use crate::equality::{term_eq, EqConfig, EqError};
use crate::gen::{
    default_context, random_discrete_fn, random_point, random_poly_body, random_poly_fn, random_polynomial,
    random_term, random_type, real_tuple, GenConfig, TermGen,
};
use crate::reduce::{is_interpretable_nf, normalize_with, step, Fuel, Options, ReduceError, Strategy};
use crate::syntax::{alpha_eq, free_vars, substitute, Term, Type, TypingContext};
use crate::theorems::{
    check_chain_rule, check_equation, check_incremental, check_newton_leibniz, check_taylor, law_additivity,
    law_linearity, law_product, law_telescoping, TheoremError, TheoremReport, Verdict,
};
use crate::typeck::{derivative_type, is_addable, typecheck};
use crate::{sexpr, text};

pub const SUITES: &[&str] = &[
    "metatheory",
    "equality",
    "lemmas",
    "newton_leibniz",
    "chain_rule",
    "taylor",
    "laws",
    "incremental",
    "discrete",
    "round_trip",
];

const MAX_EXAMPLES: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub inconclusive: usize,
    pub millis: u128,
    pub examples: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            inconclusive: 0,
            millis: 0,
            examples: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.inconclusive == 0
    }

    fn pass(&mut self) {
        self.cases += 1;
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.cases += 1;
        self.failures += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(msg());
        }
    }

    fn unsure(&mut self, msg: impl FnOnce() -> String) {
        self.cases += 1;
        self.inconclusive += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(msg());
        }
    }

    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if ok {
            self.pass()
        } else {
            self.fail(msg)
        }
    }

    fn report(&mut self, r: Result<TheoremReport, TheoremError>) {
        match r {
            Ok(r) if r.verdict == Verdict::Holds => self.pass(),
            Ok(r) if r.verdict == Verdict::Inconclusive => self.unsure(|| format!("inconclusive: {:?}", r.inputs)),
            Ok(r) => self.fail(|| format!("fails: {:?}", r.inputs)),
            Err(e) => self.unsure(|| e.to_string()),
        }
    }
}

fn rng_for(seed: u64, salt: &str) -> ChaCha8Rng {
    let h = salt.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn timed(mut reports: Vec<SuiteReport>, start: Instant) -> Vec<SuiteReport> {
    let ms = start.elapsed().as_millis();
    for r in &mut reports {
        r.millis = ms;
    }
    reports
}

/// Runs the named suite. `cases` overrides the default case count.
pub fn run(name: &str, seed: u64, cases: Option<usize>) -> Option<Vec<SuiteReport>> {
    let c = |d: usize| cases.unwrap_or(d);
    Some(match name {
        "metatheory" => metatheory(seed, c(250)),
        "equality" => equality_relation(seed, c(100)),
        "lemmas" => lemmas(seed, c(100)),
        "newton_leibniz" => vec![newton_leibniz(seed, c(100))],
        "chain_rule" => vec![chain_rule(seed, c(100))],
        "taylor" => vec![taylor(seed, c(100))],
        "laws" => laws(seed, c(100)),
        "incremental" => vec![incremental(seed, c(100))],
        "discrete" => vec![discrete_defining_equation(seed, c(100))],
        "round_trip" => vec![round_trip(seed, c(500))],
        _ => return None,
    })
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    SUITES.iter().flat_map(|s| run(s, seed, None).unwrap()).collect()
}

fn metatheory_config() -> GenConfig {
    GenConfig {
        depth: 5,
        ..GenConfig::default()
    }
}

/// Preservation, progress, confluence, strong normalization and
/// interpretability over random fix-free terms.
pub fn metatheory(seed: u64, cases: usize) -> Vec<SuiteReport> {
    let start = Instant::now();
    let mut rng = rng_for(seed, "metatheory");
    let ctx = default_context();
    let cfg = metatheory_config();
    let eq_cfg = EqConfig::with_seed(seed);
    let mut pres = SuiteReport::new("preservation");
    let mut prog = SuiteReport::new("progress");
    let mut conf = SuiteReport::new("confluence");
    let mut sn = SuiteReport::new("strong_normalization");
    let mut interp = SuiteReport::new("interpretability");
    for i in 0..cases {
        let (t, ty) = random_term(&mut rng, &cfg, &ctx);
        let opts = Options {
            fuel: Fuel::new(100_000),
            strategy: Strategy::LeftmostOutermost,
            trace: true,
        };
        let n = match normalize_with(&ctx, &t, &opts) {
            Ok(n) => {
                prog.pass();
                sn.pass();
                n
            }
            Err(ReduceError::StuckTerm(s)) => {
                prog.fail(|| format!("{t} gets stuck at {s}"));
                sn.pass();
                continue;
            }
            Err(ReduceError::FuelExhausted { .. }) => {
                prog.pass();
                sn.fail(|| format!("{t} exhausts fuel"));
                continue;
            }
            Err(e) => {
                prog.fail(|| format!("{t}: {e}"));
                continue;
            }
        };
        let terms = n.trace.as_ref().map(|tr| tr.terms(&t)).unwrap_or_default();
        let bad = terms.iter().find(|u| typecheck(&ctx, u).ok().as_ref() != Some(&ty));
        pres.record(bad.is_none(), || format!("{t} steps to ill-typed {}", bad.unwrap()));
        if ty.is_interpretable() {
            interp.record(is_interpretable_nf(&ctx, &n.term), || format!("{} is not interpretable", n.term));
        } else {
            interp.pass();
        }
        let other = Options {
            strategy: Strategy::Random(seed.wrapping_add(i as u64)),
            trace: false,
            ..opts
        };
        match normalize_with(&ctx, &t, &other) {
            Ok(r) if alpha_eq(&r.term, &n.term) => conf.pass(),
            Ok(r) => match term_eq(&ctx, &n.term, &r.term, &eq_cfg) {
                Ok(o) => conf.record(o.equal, || format!("{t}: {} vs {}", n.term, r.term)),
                Err(e) => conf.unsure(|| format!("{t}: {e}")),
            },
            Err(e) => conf.fail(|| format!("{t}: random strategy {e}")),
        }
    }
    timed(vec![pres, prog, conf, sn, interp], start)
}

fn pair_config() -> GenConfig {
    GenConfig {
        depth: 3,
        allow_prims: false,
        ..GenConfig::default()
    }
}

fn addable_type<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Type {
    loop {
        let t = random_type(rng, 2, cfg);
        if is_addable(&t) {
            return t;
        }
    }
}

/// Reduces `t` by a random number of leftmost-outermost steps.
fn partially_reduce<R: Rng>(rng: &mut R, ctx: &TypingContext, t: &Term) -> Term {
    let mut cur = t.clone();
    for _ in 0..rng.gen_range(0..6) {
        match step(ctx, &cur) {
            Ok(Some(s)) => match s.apply(&cur) {
                Some(next) => cur = next,
                None => break,
            },
            _ => break,
        }
    }
    cur
}

fn eq_holds(ctx: &TypingContext, a: &Term, b: &Term, cfg: &EqConfig) -> Result<bool, EqError> {
    term_eq(ctx, a, b, cfg).map(|o| o.equal)
}

fn paths(t: &Term, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        prefix.push(i);
        paths(c, prefix, out);
        prefix.pop();
    }
}

/// Equivalence-relation laws, congruence, subterm substitution,
/// reduction-respecting substitution and type consistency.
pub fn equality_relation(seed: u64, cases: usize) -> Vec<SuiteReport> {
    let start = Instant::now();
    let mut rng = rng_for(seed, "equality");
    let ctx = default_context();
    let cfg = pair_config();
    let eq_cfg = EqConfig::with_seed(seed);
    let mut refl = SuiteReport::new("eq_reflexive");
    let mut sym = SuiteReport::new("eq_symmetric");
    let mut trans = SuiteReport::new("eq_transitive");
    let mut cong = SuiteReport::new("eq_add_congruence");
    let mut lsub = SuiteReport::new("eq_subterm_substitution");
    let mut resub = SuiteReport::new("eq_reduction_substitution");
    let mut cons = SuiteReport::new("eq_consistency");
    for _ in 0..cases {
        let ty = addable_type(&mut rng, &cfg);
        let (a, b) = {
            let mut g = TermGen::new(&mut rng, cfg.clone(), ctx.clone());
            (g.term(&ty, 3), g.term(&ty, 3))
        };
        match eq_holds(&ctx, &a, &a, &eq_cfg) {
            Ok(ok) => refl.record(ok, || format!("{a} differs from itself")),
            Err(e) => refl.unsure(|| format!("{a}: {e}")),
        }
        match (eq_holds(&ctx, &a, &b, &eq_cfg), eq_holds(&ctx, &b, &a, &eq_cfg)) {
            (Ok(x), Ok(y)) => sym.record(x == y, || format!("{a} vs {b}")),
            (Err(e), _) | (_, Err(e)) => sym.unsure(|| format!("{a} vs {b}: {e}")),
        }
        let a1 = partially_reduce(&mut rng, &ctx, &a);
        let a2 = partially_reduce(&mut rng, &ctx, &a1);
        match (
            eq_holds(&ctx, &a, &a1, &eq_cfg),
            eq_holds(&ctx, &a1, &a2, &eq_cfg),
            eq_holds(&ctx, &a, &a2, &eq_cfg),
        ) {
            (Ok(x), Ok(y), Ok(z)) => trans.record(!(x && y) || z, || format!("{a}, {a1}, {a2}")),
            _ => trans.unsure(|| format!("{a}: undefined")),
        }
        let b1 = partially_reduce(&mut rng, &ctx, &b);
        match eq_holds(&ctx, &Term::add(a.clone(), b.clone()), &Term::add(a2.clone(), b1.clone()), &eq_cfg) {
            Ok(ok) => cong.record(ok, || format!("{a} (+) {b}")),
            Err(e) => cong.unsure(|| e.to_string()),
        }

        let mut ps = Vec::new();
        paths(&a, &mut Vec::new(), &mut ps);
        let closed: Vec<_> = ps
            .into_iter()
            .filter(|p| {
                let s = a.subterm_at(p).unwrap();
                free_vars(s).iter().all(|x| ctx.contains(x)) && typecheck(&ctx, s).is_ok()
            })
            .collect();
        let p = closed.choose(&mut rng).unwrap();
        let s = a.subterm_at(p).unwrap();
        let s_nf = normalize_with(&ctx, s, &Options::default()).map(|n| n.term);
        match s_nf {
            Ok(s_nf) => {
                let replaced = a.replace_at(p, s_nf).unwrap();
                match eq_holds(&ctx, &a, &replaced, &eq_cfg) {
                    Ok(ok) => lsub.record(ok, || format!("{a} at {p:?}")),
                    Err(e) => lsub.unsure(|| e.to_string()),
                }
            }
            Err(e) => lsub.unsure(|| e.to_string()),
        }

        let arg_ty = random_type(&mut rng, 1, &cfg);
        let xctx = ctx.clone().with("xs", arg_ty.clone());
        let (t1, t2) = {
            let mut g = TermGen::new(&mut rng, cfg.clone(), xctx.clone());
            let t1 = g.term(&ty, 3);
            let mut g = TermGen::new(g.rng, cfg.clone(), ctx.clone());
            (t1, g.term(&arg_ty, 2))
        };
        let t1r = partially_reduce(&mut rng, &xctx, &t1);
        let t2r = partially_reduce(&mut rng, &ctx, &t2);
        match eq_holds(&ctx, &substitute(&t1, "xs", &t2), &substitute(&t1r, "xs", &t2r), &eq_cfg) {
            Ok(ok) => resub.record(ok, || format!("{t1}[{t2}/xs]")),
            Err(e) => resub.unsure(|| e.to_string()),
        }

        let other = loop {
            let o = random_type(&mut rng, 2, &cfg);
            if o != ty {
                break o;
            }
        };
        let c = TermGen::new(&mut rng, cfg.clone(), ctx.clone()).term(&other, 2);
        match term_eq(&ctx, &a, &c, &eq_cfg) {
            Err(EqError::TypeMismatch(..)) => cons.pass(),
            Ok(o) if !o.equal => cons.pass(),
            _ => cons.fail(|| format!("{a} equated with {c}")),
        }
    }
    timed(vec![refl, sym, trans, cong, lsub, resub, cons], start)
}

/// Distributivity of `*` over `⊕` and telescoping of `⊖`.
pub fn lemmas(seed: u64, cases: usize) -> Vec<SuiteReport> {
    let start = Instant::now();
    let mut rng = rng_for(seed, "lemmas");
    let ctx = default_context();
    let cfg = pair_config();
    let eq_cfg = EqConfig::with_seed(seed);
    let mut dist = SuiteReport::new("eq_distributivity");
    let mut com = SuiteReport::new("eq_telescoping");
    for _ in 0..cases {
        let ty = addable_type(&mut rng, &cfg);
        let dom = if rng.gen_bool(0.6) { Type::real() } else { real_tuple(2) };
        let dt = derivative_type(&ty, &dom).expect("domain");
        let mut g = TermGen::new(&mut rng, cfg.clone(), ctx.clone());
        let (t1, t2, t3) = (g.term(&dt, 2), g.term(&dom, 2), g.term(&dom, 2));
        let lhs = Term::mul(t1.clone(), Term::add(t2.clone(), t3.clone()));
        let rhs = Term::add(Term::mul(t1.clone(), t2), Term::mul(t1, t3));
        match eq_holds(&ctx, &lhs, &rhs, &eq_cfg) {
            Ok(ok) => dist.record(ok, || format!("{lhs} = {rhs}")),
            Err(e) => dist.unsure(|| format!("{lhs}: {e}")),
        }
        let (u1, u2, u3) = (g.term(&ty, 3), g.term(&ty, 3), g.term(&ty, 3));
        let lhs = Term::add(Term::sub(u1.clone(), u2.clone()), Term::sub(u2, u3.clone()));
        let rhs = Term::sub(u1, u3);
        match eq_holds(&ctx, &lhs, &rhs, &eq_cfg) {
            Ok(ok) => com.record(ok, || format!("{lhs} = {rhs}")),
            Err(e) => com.unsure(|| format!("{lhs}: {e}")),
        }
    }
    timed(vec![dist, com], start)
}

fn symbolic_ctx() -> TypingContext {
    ["a", "b", "c", "d"].iter().fold(TypingContext::new(), |c, x| c.with(*x, Type::real()))
}

/// A point of `R^n` mixing constants and the variables of `symbolic_ctx`.
fn mixed_point<R: Rng>(rng: &mut R, n: usize) -> Term {
    let atoms = [Term::var("a"), Term::var("b"), Term::var("c"), Term::var("d")];
    let items: Vec<Term> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                atoms.choose(rng).unwrap().clone()
            } else {
                Term::num(rng.gen_range(-3..=3))
            }
        })
        .collect();
    if n == 1 {
        items.into_iter().next().unwrap()
    } else {
        Term::tuple(items)
    }
}

pub fn newton_leibniz(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = rng_for(seed, "newton_leibniz");
    let ctx = symbolic_ctx();
    let cfg = EqConfig::with_seed(seed);
    let mut rep = SuiteReport::new("newton_leibniz");
    for _ in 0..cases {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let t = random_poly_body(&mut rng, "y", n, m, 3);
        let (t1, t2) = (mixed_point(&mut rng, n), mixed_point(&mut rng, n));
        let t1c = t1.clone();
        rep.report(check_newton_leibniz(&ctx, &t, "y", &t1c, &t2, &cfg));
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

pub fn chain_rule(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = rng_for(seed, "chain_rule");
    let ctx = symbolic_ctx();
    let cfg = EqConfig::with_seed(seed);
    let mut rep = SuiteReport::new("chain_rule");
    for _ in 0..cases {
        let (n, k, m) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=3));
        let g = random_poly_fn(&mut rng, n, k, 2);
        let f = random_poly_fn(&mut rng, k, m, 2);
        let (t1, t) = (mixed_point(&mut rng, n), mixed_point(&mut rng, n));
        rep.report(check_chain_rule(&ctx, &f, &g, &t1, &t, &cfg));
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

/// Taylor expansion at order equal to the degree bound reproduces `f t`.
pub fn taylor(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = rng_for(seed, "taylor");
    let ctx = symbolic_ctx();
    let cfg = EqConfig::with_seed(seed);
    let mut rep = SuiteReport::new("taylor_exactness");
    for _ in 0..cases {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=2);
        let d = rng.gen_range(1..=3);
        let f = random_poly_fn(&mut rng, n, m, d);
        let t0 = random_point(&mut rng, n);
        let t = mixed_point(&mut rng, n);
        rep.report(check_taylor(&ctx, &f, &t0, &t, d, &cfg));
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

/// Additivity, product rule, linearity and telescoping.
pub fn laws(seed: u64, cases: usize) -> Vec<SuiteReport> {
    let start = Instant::now();
    let mut rng = rng_for(seed, "laws");
    let ctx = symbolic_ctx();
    let cfg = EqConfig::with_seed(seed);
    let names = ["additivity", "product_rule", "linearity", "telescoping"];
    let mut reps: Vec<SuiteReport> = names.iter().map(|n| SuiteReport::new(&format!("law_{n}"))).collect();
    let with_x = [Term::var("x"), Term::var("a"), Term::var("b")];
    let without_x = [Term::var("a"), Term::var("b"), Term::var("c")];
    for _ in 0..cases {
        let m = rng.gen_range(1..=2);
        let poly = |rng: &mut ChaCha8Rng, atoms: &[Term], m: usize| {
            let items: Vec<Term> = (0..m).map(|_| random_polynomial(rng, atoms, 3)).collect();
            if m == 1 {
                items.into_iter().next().unwrap()
            } else {
                Term::tuple(items)
            }
        };
        let t3 = mixed_point(&mut rng, 1);
        let (t1, t2) = (poly(&mut rng, &with_x, m), poly(&mut rng, &with_x, m));
        let cases = [
            law_additivity(&t1, &t2, "x", &t3),
            law_product(&poly(&mut rng, &with_x, 1), &poly(&mut rng, &with_x, 1), "x", &t3),
            law_linearity(&poly(&mut rng, &without_x, m), "x", &t3),
            law_telescoping(&(0..rng.gen_range(2..=5)).map(|_| poly(&mut rng, &without_x, m)).collect::<Vec<_>>()),
        ];
        for ((l, r), rep) in cases.into_iter().zip(reps.iter_mut()) {
            let name = rep.name.clone();
            rep.report(check_equation(&name, &ctx, &l, &r, Default::default(), &cfg));
        }
    }
    timed(reps, start)
}

pub fn incremental(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = rng_for(seed, "incremental");
    let ctx = symbolic_ctx();
    let cfg = EqConfig::with_seed(seed);
    let mut rep = SuiteReport::new("incremental");
    for _ in 0..cases {
        let (n, m) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let f = random_poly_fn(&mut rng, n, m, 3);
        let (x, dx) = (mixed_point(&mut rng, n), mixed_point(&mut rng, n));
        rep.report(check_incremental(&ctx, &f, &x, &dx, &cfg));
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

/// `f (x ⊕ dx) = f x ⊕ Derive f x dx` on random discrete programs.
pub fn discrete_defining_equation(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = rng_for(seed, "discrete");
    let ctx = symbolic_ctx();
    let cfg = EqConfig::with_seed(seed);
    let mut rep = SuiteReport::new("discrete_defining_equation");
    let atoms = ["a", "b", "c", "d"];
    for _ in 0..cases {
        let f = random_discrete_fn(&mut rng);
        let pick = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.7) {
                discrete::DTerm::var(*atoms.choose(rng).unwrap())
            } else {
                discrete::DTerm::num(rng.gen_range(-3..=3))
            }
        };
        let (x, dx) = (pick(&mut rng), pick(&mut rng));
        match discrete::check_defining_equation(&ctx, &f, &x, &dx, &cfg) {
            Ok(o) => rep.record(o.equal, || format!("{f} at {x}, {dx}")),
            Err(e) => rep.unsure(|| format!("{f}: {e}")),
        }
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

/// Text and S-expression printing followed by parsing is the identity.
pub fn round_trip(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = rng_for(seed, "round_trip");
    let ctx = default_context();
    let cfg = GenConfig {
        allow_fix: true,
        ..GenConfig::default()
    };
    let mut rep = SuiteReport::new("round_trip");
    for _ in 0..cases {
        let (t, _) = random_term(&mut rng, &cfg, &ctx);
        let txt = text::print_term(&t, text::Style::ASCII);
        let uni = text::print_term(&t, text::Style::UNICODE);
        let sx = sexpr::print_term(&t);
        let ok = text::parse_term(&txt).as_ref() == Ok(&t)
            && text::parse_term(&uni).as_ref() == Ok(&t)
            && sexpr::parse_term(&sx).as_ref() == Ok(&t)
            && sexpr::print_term(&sexpr::parse_term(&sx).unwrap()) == sx;
        rep.record(ok, || txt.clone());
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for name in SUITES {
            for r in run(name, 5, Some(6)).unwrap() {
                assert!(r.passed(), "{}: {:?}", r.name, r.examples);
                assert_eq!(r.cases, 6, "{}", r.name);
            }
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run("nope", 0, None).is_none());
    }
}
