//! The higher-order notations (function derivative, iterated derivative,
//! power multiplication) and checkers for Newton-Leibniz, the Chain Rule and
//! Taylor expansion.

use std::collections::BTreeMap;

use num::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::embed::simplify;
use crate::equality::{term_eq, EqConfig, EqError, Names, Witness};
use crate::real::inverse_factorial;
use crate::reduce::{normalize, ReduceError};
use crate::syntax::{rename_bound, substitute, substitute_all, Term, Type, TypingContext};
use crate::typeck::{typecheck_with, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error("expected a lambda abstraction, found {0}")]
    NotALambda(String),
    #[error("no derivative type with respect to {0}")]
    NoDerivativeType(Type),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Eq(EqError),
}

impl From<EqError> for TheoremError {
    fn from(e: EqError) -> Self {
        match e {
            EqError::Type(t) => TheoremError::Type(t),
            other => TheoremError::Eq(other),
        }
    }
}

fn as_lambda(ctx: &TypingContext, f: &Term) -> Result<(String, Type, Term), TheoremError> {
    let lam = match f {
        Term::Lam { .. } => f.clone(),
        _ => normalize(ctx, f, Default::default())?,
    };
    match lam {
        Term::Lam { var, ty, body } => Ok((var, ty, *body)),
        other => Err(TheoremError::NotALambda(other.to_string())),
    }
}

/// `(λx:T. t)' = λx:T. ∂t[y/x]/∂y|_x` with `y` fresh.
pub fn fun_derive(ctx: &TypingContext, f: &Term) -> Result<Term, TheoremError> {
    let (x, ty, body) = as_lambda(ctx, f)?;
    if !ty.is_differentiable_domain() {
        return Err(TheoremError::NoDerivativeType(ty));
    }
    let mut names = Names::avoiding([f], ctx);
    let y = names.fresh(&x);
    let inner = rename_bound(&x, &body, &y);
    Ok(Term::lam(x.clone(), ty, Term::der(inner, y, Term::var(x))))
}

/// `f^(n)`, with `f^(0) = f`.
pub fn derive_n(ctx: &TypingContext, f: &Term, n: usize) -> Result<Term, TheoremError> {
    (0..n).try_fold(f.clone(), |g, _| fun_derive(ctx, &g))
}

/// `t * t1^n = (t * t1) * t1^(n-1)`, with `t * t1^0 = t`.
pub fn power_mul(ctx: &TypingContext, t: &Term, t1: &Term, n: usize) -> Result<Term, TypeError> {
    let mut acc = t.clone();
    for _ in 0..n {
        acc = Term::mul(acc, t1.clone());
        typecheck_with(ctx, &acc, crate::real::PrimTable::shared())?;
    }
    Ok(acc)
}

/// A Taylor polynomial of `f` around `center`, evaluated at `point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorExpansion {
    pub center: Term,
    pub order: usize,
    /// `partial_sums[j]` is the expansion up to order `j`.
    pub partial_sums: Vec<Term>,
    pub coefficients: Vec<BigRational>,
}

impl TaylorExpansion {
    pub fn term(&self) -> &Term {
        self.partial_sums.last().expect("order 0 term")
    }
}

/// `f t0 ⊕ Σ_{j=1..k} ((f^(j) t0) * (t ⊖ t0)^j) * 1/j!`.
pub fn taylor_expand(
    ctx: &TypingContext,
    f: &Term,
    t0: &Term,
    t: &Term,
    k: usize,
) -> Result<TaylorExpansion, TheoremError> {
    let delta = Term::sub(t.clone(), t0.clone());
    let mut sums = vec![Term::app(f.clone(), t0.clone())];
    let mut coefficients = vec![inverse_factorial(0)];
    let mut deriv = f.clone();
    for j in 1..=k {
        deriv = fun_derive(ctx, &deriv)?;
        let c = inverse_factorial(j as u32);
        let power = power_mul(ctx, &Term::app(deriv.clone(), t0.clone()), &delta, j)?;
        let term = Term::mul(power, Term::rational(c.clone()));
        sums.push(Term::add(sums[j - 1].clone(), term));
        coefficients.push(c);
    }
    typecheck_with(ctx, sums.last().expect("non-empty"), crate::real::PrimTable::shared())?;
    Ok(TaylorExpansion {
        center: t0.clone(),
        order: k,
        partial_sums: sums,
        coefficients,
    })
}

/// The gradient `∂(f x)/∂x|_point`, normalized and simplified.
pub fn ad_gradient(ctx: &TypingContext, f: &Term, point: &Term) -> Result<Term, TheoremError> {
    let mut names = Names::avoiding([f, point], ctx);
    let x = names.fresh("x");
    let t = Term::der(Term::app(f.clone(), Term::var(x.clone())), x, point.clone());
    typecheck_with(ctx, &t, crate::real::PrimTable::shared())?;
    let n = normalize(ctx, &t, Default::default())?;
    Ok(simplify(ctx, &n, crate::real::PrimTable::shared()))
}

/// The unnormalized increment `∫_x^{x ⊕ delta} ∂(f y)/∂y|_z dz`.
pub fn increment_term(ctx: &TypingContext, f: &Term, x: &Term, delta: &Term) -> Term {
    let mut names = Names::avoiding([f, x, delta], ctx);
    let y = names.fresh("y");
    let z = names.fresh("z");
    Term::int(
        x.clone(),
        Term::add(x.clone(), delta.clone()),
        Term::der(Term::app(f.clone(), Term::var(y.clone())), y, Term::var(z.clone())),
        z,
    )
}

/// The change of `f` when its argument moves from `x` to `x ⊕ delta`,
/// normalized and simplified.
pub fn derive_incremental(ctx: &TypingContext, f: &Term, x: &Term, delta: &Term) -> Result<Term, TheoremError> {
    let t = increment_term(ctx, f, x, delta);
    typecheck_with(ctx, &t, crate::real::PrimTable::shared())?;
    let n = normalize(ctx, &t, Default::default())?;
    Ok(simplify(ctx, &n, crate::real::PrimTable::shared()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    /// A side did not normalize within the fuel.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub inputs: BTreeMap<String, String>,
    pub lhs_nf: Option<String>,
    pub rhs_nf: Option<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Splits free tuple-of-base variables into fresh base variables so that an
/// open side can be shown in normal form.
fn display_nf(ctx: &TypingContext, t: &Term, cfg: &EqConfig) -> Option<String> {
    let mut names = Names::avoiding([t], ctx);
    let mut dctx = ctx.clone();
    let mut map = BTreeMap::new();
    for (x, ty) in ctx.bindings() {
        if let Type::Product(ts) = ty {
            if ts.iter().all(Type::is_base) {
                let parts = ts
                    .iter()
                    .map(|b| {
                        let v = names.fresh(x);
                        dctx.push(v.clone(), b.clone());
                        Term::var(v)
                    })
                    .collect();
                map.insert(x.clone(), Term::Tuple(parts));
            }
        }
    }
    let n = normalize(&dctx, &substitute_all(t, &map), cfg.fuel).ok()?;
    Some(simplify(&dctx, &n, &cfg.prims).to_string())
}

/// Compares two sides of an equation and packages the outcome.
pub fn check_equation(
    theorem: &str,
    ctx: &TypingContext,
    lhs: &Term,
    rhs: &Term,
    inputs: BTreeMap<String, String>,
    cfg: &EqConfig,
) -> Result<TheoremReport, TheoremError> {
    let (verdict, witness) = match term_eq(ctx, lhs, rhs, cfg) {
        Ok(o) if o.equal => (Verdict::Holds, None),
        Ok(o) => (Verdict::Fails, o.witness),
        Err(EqError::Undefined(ReduceError::FuelExhausted { .. })) => (Verdict::Inconclusive, None),
        Err(e) => return Err(e.into()),
    };
    Ok(TheoremReport {
        theorem: theorem.to_string(),
        inputs,
        lhs_nf: display_nf(ctx, lhs, cfg),
        rhs_nf: display_nf(ctx, rhs, cfg),
        verdict,
        witness,
    })
}

fn inputs(pairs: &[(&str, &Term)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Both sides of the Newton-Leibniz formula:
/// `∫_{t1}^{t2} ∂t/∂y|_x dx` and `t[t2/y] ⊖ t[t1/y]`.
pub fn newton_leibniz_sides(ctx: &TypingContext, t: &Term, y: &str, t1: &Term, t2: &Term) -> (Term, Term) {
    let mut names = Names::avoiding([t, t1, t2], ctx);
    let x = names.fresh("x");
    let lhs = Term::int(
        t1.clone(),
        t2.clone(),
        Term::der(t.clone(), y, Term::var(x.clone())),
        x,
    );
    let rhs = Term::sub(substitute(t, y, t2), substitute(t, y, t1));
    (lhs, rhs)
}

pub fn check_newton_leibniz(
    ctx: &TypingContext,
    t: &Term,
    y: &str,
    t1: &Term,
    t2: &Term,
    cfg: &EqConfig,
) -> Result<TheoremReport, TheoremError> {
    let (lhs, rhs) = newton_leibniz_sides(ctx, t, y, t1, t2);
    let mut ins = inputs(&[("t", t), ("t1", t1), ("t2", t2)]);
    ins.insert("y".into(), y.into());
    check_equation("newton_leibniz", ctx, &lhs, &rhs, ins, cfg)
}

/// Both sides of the Chain Rule:
/// `∂(f (g x))/∂x|_{t1} * t` and `∂(f y)/∂y|_{g t1} * (∂(g z)/∂z|_{t1} * t)`.
pub fn chain_rule_sides(ctx: &TypingContext, f: &Term, g: &Term, t1: &Term, t: &Term) -> (Term, Term) {
    let mut names = Names::avoiding([f, g, t1, t], ctx);
    let (x, y, z) = (names.fresh("x"), names.fresh("y"), names.fresh("z"));
    let app = |h: &Term, a: Term| Term::app(h.clone(), a);
    let lhs = Term::mul(
        Term::der(app(f, app(g, Term::var(x.clone()))), x, t1.clone()),
        t.clone(),
    );
    let rhs = Term::mul(
        Term::der(app(f, Term::var(y.clone())), y, app(g, t1.clone())),
        Term::mul(Term::der(app(g, Term::var(z.clone())), z, t1.clone()), t.clone()),
    );
    (lhs, rhs)
}

pub fn check_chain_rule(
    ctx: &TypingContext,
    f: &Term,
    g: &Term,
    t1: &Term,
    t: &Term,
    cfg: &EqConfig,
) -> Result<TheoremReport, TheoremError> {
    let (lhs, rhs) = chain_rule_sides(ctx, f, g, t1, t);
    let ins = inputs(&[("f", f), ("g", g), ("t1", t1), ("t", t)]);
    check_equation("chain_rule", ctx, &lhs, &rhs, ins, cfg)
}

/// Compares the order-`k` expansion of `f` around `t0` with `f t`.
pub fn check_taylor(
    ctx: &TypingContext,
    f: &Term,
    t0: &Term,
    t: &Term,
    k: usize,
    cfg: &EqConfig,
) -> Result<TheoremReport, TheoremError> {
    let exp = taylor_expand(ctx, f, t0, t, k)?;
    let rhs = Term::app(f.clone(), t.clone());
    let mut ins = inputs(&[("f", f), ("t0", t0), ("t", t)]);
    ins.insert("order".into(), k.to_string());
    check_equation("taylor", ctx, exp.term(), &rhs, ins, cfg)
}

/// `f (x ⊕ delta) = f x ⊕ increment`.
pub fn check_incremental(
    ctx: &TypingContext,
    f: &Term,
    x: &Term,
    delta: &Term,
    cfg: &EqConfig,
) -> Result<TheoremReport, TheoremError> {
    let lhs = Term::app(f.clone(), Term::add(x.clone(), delta.clone()));
    let rhs = Term::add(Term::app(f.clone(), x.clone()), increment_term(ctx, f, x, delta));
    let ins = inputs(&[("f", f), ("x", x), ("delta", delta)]);
    check_equation("incremental", ctx, &lhs, &rhs, ins, cfg)
}

/// `∂(t1 ⊕ t2)/∂x|_{t3} = ∂t1/∂x|_{t3} ⊕ ∂t2/∂x|_{t3}`.
pub fn law_additivity(t1: &Term, t2: &Term, x: &str, t3: &Term) -> (Term, Term) {
    (
        Term::der(Term::add(t1.clone(), t2.clone()), x, t3.clone()),
        Term::add(Term::der(t1.clone(), x, t3.clone()), Term::der(t2.clone(), x, t3.clone())),
    )
}

/// `∂(t1 * t2)/∂x|_{t3} = ∂t1/∂x|_{t3} * t2[t3/x] ⊕ t1[t3/x] * ∂t2/∂x|_{t3}`
/// for a base-typed `x`.
pub fn law_product(t1: &Term, t2: &Term, x: &str, t3: &Term) -> (Term, Term) {
    (
        Term::der(Term::mul(t1.clone(), t2.clone()), x, t3.clone()),
        Term::add(
            Term::mul(Term::der(t1.clone(), x, t3.clone()), substitute(t2, x, t3)),
            Term::mul(substitute(t1, x, t3), Term::der(t2.clone(), x, t3.clone())),
        ),
    )
}

/// `∂(t1 * x)/∂x|_{t2} = t1` when `x` is not free in `t1`.
pub fn law_linearity(t1: &Term, x: &str, t2: &Term) -> (Term, Term) {
    (
        Term::der(Term::mul(t1.clone(), Term::var(x)), x, t2.clone()),
        t1.clone(),
    )
}

/// `(t1 ⊖ t2) ⊕ (t2 ⊖ t3) ⊕ ... ⊕ (t_{n-1} ⊖ t_n) = t1 ⊖ t_n`.
pub fn law_telescoping(ts: &[Term]) -> (Term, Term) {
    assert!(ts.len() >= 2, "telescoping needs two terms");
    let diffs = ts.windows(2).map(|w| Term::sub(w[0].clone(), w[1].clone())).collect();
    (Term::add_all(diffs), Term::sub(ts[0].clone(), ts[ts.len() - 1].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equality::terms_equal;
    use crate::text::{parse_term, parse_type};

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn ctx_of(vars: &[(&str, &str)]) -> TypingContext {
        vars.iter().map(|(n, t)| (n.to_string(), parse_type(t).unwrap())).collect()
    }

    const F: &str = r"(\x:(R,R). (pi1 x (+) pi2 x, pi1 x * pi2 x, pi2 x))";
    const TAYLOR_F: &str = r"(\x:(R,R). (2 * pi1 x * pi2 x, 3 * pi1 x * pi1 x (+) pi2 x))";

    #[test]
    fn function_derivative() {
        let ctx = TypingContext::new();
        let d = fun_derive(&ctx, &p(r"\x:R. x * x")).unwrap();
        assert_eq!(d, p(r"\x:R. D{ x_1 * x_1 ; x_1 @ x }"));
        assert!(terms_equal(&ctx, &d, &p(r"\x:R. 2 * x")).unwrap());
        assert!(matches!(
            fun_derive(&ctx, &p(r"\x:R->R. x 1")),
            Err(TheoremError::NoDerivativeType(_))
        ));
        assert!(matches!(fun_derive(&ctx, &p("3")), Err(TheoremError::NotALambda(_))));
    }

    #[test]
    fn taylor_example_derivatives() {
        let ctx = ctx_of(&[("c1", "R"), ("c2", "R")]);
        let f = p(TAYLOR_F);
        let d1 = Term::mul(Term::app(derive_n(&ctx, &f, 1).unwrap(), p("(0,0)")), p("(c1,c2)"));
        assert!(terms_equal(&ctx, &d1, &p("(0,c2)")).unwrap());
        let d2 = Term::app(derive_n(&ctx, &f, 2).unwrap(), p("(0,0)"));
        assert!(terms_equal(&ctx, &d2, &p("(((0,6),(2,0)),((2,0),(0,0)))")).unwrap());
        let sq = power_mul(&ctx, &d2, &p("(c1,c2)"), 2).unwrap();
        assert!(terms_equal(&ctx, &sq, &p("(4 * c1 * c2, 6 * c1 * c1)")).unwrap());
        assert_eq!(derive_n(&ctx, &f, 0).unwrap(), f);
        assert_eq!(power_mul(&ctx, &f, &p("1"), 0).unwrap(), f);
    }

    #[test]
    fn taylor_expansion_is_exact_for_polynomials() {
        let ctx = ctx_of(&[("c1", "R"), ("c2", "R")]);
        let f = p(TAYLOR_F);
        let e = taylor_expand(&ctx, &f, &p("(0,0)"), &p("(c1,c2)"), 2).unwrap();
        assert_eq!(e.partial_sums.len(), 3);
        assert!(terms_equal(&ctx, e.term(), &p("(2 * c1 * c2, 3 * c1 * c1 (+) c2)")).unwrap());
        let r = check_taylor(&ctx, &f, &p("(0,0)"), &p("(c1,c2)"), 2, &EqConfig::default()).unwrap();
        assert!(r.holds());
        let r = check_taylor(&ctx, &f, &p("(0,0)"), &p("(c1,c2)"), 1, &EqConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn newton_leibniz_golden() {
        let ctx = TypingContext::new();
        let r = check_newton_leibniz(&ctx, &p(&format!("{F} y")), "y", &p("(0,0)"), &p("(2,3)"), &EqConfig::default())
            .unwrap();
        assert!(r.holds());
        assert_eq!(r.lhs_nf.as_deref(), Some("(5,6,3)"));
        assert_eq!(r.rhs_nf.as_deref(), Some("(5,6,3)"));
    }

    #[test]
    fn chain_rule_golden() {
        let ctx = ctx_of(&[("r1", "R"), ("r2", "R"), ("r3", "R"), ("r4", "R")]);
        let g = p(r"\x:(R,R). (pi1 x (+) pi2 x, pi2 x)");
        let r = check_chain_rule(&ctx, &p(F), &g, &p("(r3,r4)"), &p("(r1,r2)"), &EqConfig::default()).unwrap();
        assert!(r.holds());
        let want = p("(r1 (+) 2 * r2, r4 * r1 (+) (r3 (+) 2 * r4) * r2, r2)");
        let (lhs, _) = chain_rule_sides(&ctx, &p(F), &g, &p("(r3,r4)"), &p("(r1,r2)"));
        assert!(terms_equal(&ctx, &lhs, &want).unwrap());
    }

    #[test]
    fn gradient_and_increment() {
        let ctx = ctx_of(&[("a", "R"), ("b", "R"), ("x1", "R"), ("x2", "R"), ("d", "R")]);
        let mag = p(r"\x:(R,R). (\u:R. u * u) (pi1 x) (+) (\u:R. u * u) (pi2 x)");
        let grad = ad_gradient(&ctx, &mag, &p("(a,b)")).unwrap();
        assert!(terms_equal(&ctx, &grad, &p("(2 * a, 2 * b)")).unwrap());
        let avg = p(r"\x:(R,R). (pi1 x (+) pi2 x) * 1/2");
        let inc = derive_incremental(&ctx, &avg, &p("(x1,x2)"), &p("(d,0)")).unwrap();
        assert!(terms_equal(&ctx, &inc, &p("d * 1/2")).unwrap());
        let r = check_incremental(&ctx, &avg, &p("(x1,x2)"), &p("(d,0)"), &EqConfig::default()).unwrap();
        assert!(r.holds());
        let sq = derive_incremental(&ctx, &p(r"\x:R. x * x"), &p("2"), &p("1")).unwrap();
        assert_eq!(sq, p("5"));
    }

    #[test]
    fn discussion_laws() {
        let ctx = ctx_of(&[("c", "R"), ("k", "R")]);
        for (l, r) in [
            law_additivity(&p("x * x"), &p("x * k"), "x", &p("c")),
            law_product(&p("x * x"), &p("x (+) k"), "x", &p("c")),
            law_linearity(&p("k * k"), "x", &p("c")),
            law_telescoping(&[p("k"), p("c * c"), p("3"), p("c")]),
        ] {
            assert!(terms_equal(&ctx, &l, &r).unwrap(), "{l} = {r}");
        }
    }

    #[test]
    fn report_serializes() {
        let r = check_newton_leibniz(&TypingContext::new(), &p("y"), "y", &p("1"), &p("4"), &EqConfig::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "holds");
        assert_eq!(v["theorem"], "newton_leibniz");
        assert!(v.get("witness").is_none());
    }
}
