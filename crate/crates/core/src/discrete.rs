//! The discrete variant: finite differences `Δt/Δy|_{t0,t1}` in place of
//! derivatives and integrals, and `Derive` from change theory built on it.
//!
//! The fragment has base and function types only. A difference at the base
//! type is read as `t[t0 ⊕ t1/y] ⊖ t[t0/y]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::equality::{term_eq, EqConfig, EqError, EqOutcome};
use crate::real::PrimTable;
use crate::reduce::Fuel;
use crate::syntax::{fresh_like, fresh_var, Constant, Term, Type, TypingContext};
use crate::typeck::is_addable;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DTerm {
    Const { value: Constant, ty: Type },
    Var(String),
    Lam { var: String, ty: Type, body: Box<DTerm> },
    App(Box<DTerm>, Box<DTerm>),
    Add(Box<DTerm>, Box<DTerm>),
    Sub(Box<DTerm>, Box<DTerm>),
    /// Multiplication of reals.
    Mul(Box<DTerm>, Box<DTerm>),
    /// `Δbody/Δvar|_{at,delta}`, binding `var` in `body` only.
    DDer {
        body: Box<DTerm>,
        var: String,
        at: Box<DTerm>,
        delta: Box<DTerm>,
    },
}

impl DTerm {
    pub fn var(x: impl Into<String>) -> DTerm {
        DTerm::Var(x.into())
    }

    pub fn num(n: i64) -> DTerm {
        DTerm::Const {
            value: Constant::int(n),
            ty: Type::real(),
        }
    }

    pub fn lam(x: impl Into<String>, ty: Type, body: DTerm) -> DTerm {
        DTerm::Lam {
            var: x.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn app(f: DTerm, a: DTerm) -> DTerm {
        DTerm::App(Box::new(f), Box::new(a))
    }

    pub fn add(l: DTerm, r: DTerm) -> DTerm {
        DTerm::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: DTerm, r: DTerm) -> DTerm {
        DTerm::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: DTerm, r: DTerm) -> DTerm {
        DTerm::Mul(Box::new(l), Box::new(r))
    }

    pub fn dder(body: DTerm, var: impl Into<String>, at: DTerm, delta: DTerm) -> DTerm {
        DTerm::DDer {
            body: Box::new(body),
            var: var.into(),
            at: Box::new(at),
            delta: Box::new(delta),
        }
    }

    pub fn children(&self) -> Vec<&DTerm> {
        match self {
            DTerm::Const { .. } | DTerm::Var(_) => vec![],
            DTerm::Lam { body, .. } => vec![body],
            DTerm::App(a, b) | DTerm::Add(a, b) | DTerm::Sub(a, b) | DTerm::Mul(a, b) => vec![a, b],
            DTerm::DDer { body, at, delta, .. } => vec![body, at, delta],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

impl fmt::Display for DTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atomic(t: &DTerm) -> bool {
            matches!(t, DTerm::Const { .. } | DTerm::Var(_) | DTerm::DDer { .. })
        }
        fn wrap(t: &DTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if atomic(t) {
                write!(f, "{t}")
            } else {
                write!(f, "({t})")
            }
        }
        match self {
            DTerm::Const { value, .. } => write!(f, "{value}"),
            DTerm::Var(x) => write!(f, "{x}"),
            DTerm::Lam { var, ty, body } => write!(f, "\\{var}:{ty}. {body}"),
            DTerm::App(a, b) => {
                if matches!(**a, DTerm::App(..)) {
                    write!(f, "{a}")?;
                } else {
                    wrap(a, f)?;
                }
                write!(f, " ")?;
                wrap(b, f)
            }
            DTerm::Add(a, b) | DTerm::Sub(a, b) | DTerm::Mul(a, b) => {
                let op = match self {
                    DTerm::Add(..) => "(+)",
                    DTerm::Sub(..) => "(-)",
                    _ => "*",
                };
                wrap(a, f)?;
                write!(f, " {op} ")?;
                wrap(b, f)
            }
            DTerm::DDer { body, var, at, delta } => write!(f, "Delta{{ {body} ; {var} @ {at} , {delta} }}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiscreteError {
    #[error("`{0}` is outside the discrete fragment")]
    Unsupported(String),
    #[error("discrete type error: {0}")]
    Type(String),
    #[error("stuck term in the discrete fragment: {0}")]
    StuckTerm(String),
    #[error("fuel exhausted after {0} steps")]
    FuelExhausted(u64),
    #[error(transparent)]
    Eq(#[from] EqError),
}

/// Reads a core term with no tuples, sums, derivatives or integrals.
pub fn from_term(t: &Term) -> Result<DTerm, DiscreteError> {
    Ok(match t {
        Term::Const { value, ty } => DTerm::Const {
            value: value.clone(),
            ty: ty.clone(),
        },
        Term::Var(x) => DTerm::Var(x.clone()),
        Term::Lam { var, ty, body } => DTerm::lam(var.clone(), ty.clone(), from_term(body)?),
        Term::App(a, b) => DTerm::app(from_term(a)?, from_term(b)?),
        Term::Add(a, b) => DTerm::add(from_term(a)?, from_term(b)?),
        Term::Sub(a, b) => DTerm::sub(from_term(a)?, from_term(b)?),
        Term::Mul(a, b) => DTerm::mul(from_term(a)?, from_term(b)?),
        _ => return Err(DiscreteError::Unsupported(t.to_string())),
    })
}

/// The core term obtained by reading every difference as
/// `body[at ⊕ delta/y] ⊖ body[at/y]`.
pub fn to_term(t: &DTerm) -> Term {
    match t {
        DTerm::Const { value, ty } => Term::Const {
            value: value.clone(),
            ty: ty.clone(),
        },
        DTerm::Var(x) => Term::var(x.clone()),
        DTerm::Lam { var, ty, body } => Term::lam(var.clone(), ty.clone(), to_term(body)),
        DTerm::App(a, b) => Term::app(to_term(a), to_term(b)),
        DTerm::Add(a, b) => Term::add(to_term(a), to_term(b)),
        DTerm::Sub(a, b) => Term::sub(to_term(a), to_term(b)),
        DTerm::Mul(a, b) => Term::mul(to_term(a), to_term(b)),
        DTerm::DDer { body, var, at, delta } => {
            let b = to_term(body);
            let at = to_term(at);
            let moved = Term::add(at.clone(), to_term(delta));
            Term::sub(
                crate::syntax::substitute(&b, var, &moved),
                crate::syntax::substitute(&b, var, &at),
            )
        }
    }
}

pub fn free_vars(t: &DTerm) -> BTreeSet<String> {
    match t {
        DTerm::Const { .. } => BTreeSet::new(),
        DTerm::Var(x) => [x.clone()].into(),
        DTerm::Lam { var, body, .. } => {
            let mut s = free_vars(body);
            s.remove(var);
            s
        }
        DTerm::App(a, b) | DTerm::Add(a, b) | DTerm::Sub(a, b) | DTerm::Mul(a, b) => {
            let mut s = free_vars(a);
            s.extend(free_vars(b));
            s
        }
        DTerm::DDer { body, var, at, delta } => {
            let mut s = free_vars(body);
            s.remove(var);
            s.extend(free_vars(at));
            s.extend(free_vars(delta));
            s
        }
    }
}

fn all_names(t: &DTerm, out: &mut BTreeSet<String>) {
    match t {
        DTerm::Var(x) => {
            out.insert(x.clone());
        }
        DTerm::Lam { var, .. } | DTerm::DDer { var, .. } => {
            out.insert(var.clone());
        }
        _ => {}
    }
    for c in t.children() {
        all_names(c, out);
    }
}

/// Capture-avoiding `t[s/x]`.
pub fn substitute(t: &DTerm, x: &str, s: &DTerm) -> DTerm {
    let fv = free_vars(s);
    subst_rec(t, x, s, &fv)
}

fn subst_binder(var: &str, body: &DTerm, x: &str, s: &DTerm, fv: &BTreeSet<String>) -> (String, DTerm) {
    if var == x {
        return (var.to_string(), body.clone());
    }
    if fv.contains(var) && free_vars(body).contains(x) {
        let mut avoid = fv.clone();
        all_names(body, &mut avoid);
        avoid.insert(x.to_string());
        let n = fresh_like(var, &avoid);
        let renamed = substitute(body, var, &DTerm::Var(n.clone()));
        return (n, subst_rec(&renamed, x, s, fv));
    }
    (var.to_string(), subst_rec(body, x, s, fv))
}

fn subst_rec(t: &DTerm, x: &str, s: &DTerm, fv: &BTreeSet<String>) -> DTerm {
    let r = |u: &DTerm| subst_rec(u, x, s, fv);
    match t {
        DTerm::Const { .. } => t.clone(),
        DTerm::Var(y) if y == x => s.clone(),
        DTerm::Var(_) => t.clone(),
        DTerm::Lam { var, ty, body } => {
            let (v, b) = subst_binder(var, body, x, s, fv);
            DTerm::lam(v, ty.clone(), b)
        }
        DTerm::App(a, b) => DTerm::app(r(a), r(b)),
        DTerm::Add(a, b) => DTerm::add(r(a), r(b)),
        DTerm::Sub(a, b) => DTerm::sub(r(a), r(b)),
        DTerm::Mul(a, b) => DTerm::mul(r(a), r(b)),
        DTerm::DDer { body, var, at, delta } => {
            let (v, b) = subst_binder(var, body, x, s, fv);
            DTerm::dder(b, v, r(at), r(delta))
        }
    }
}

/// Types of the discrete fragment: base types closed under arrows.
pub fn typecheck(ctx: &TypingContext, t: &DTerm) -> Result<Type, DiscreteError> {
    let err = |m: String| Err(DiscreteError::Type(m));
    match t {
        DTerm::Const { value, ty } => {
            match value {
                Constant::Num(_) if ty.is_base() => {}
                Constant::Named(n) if PrimTable::shared().get(n).map(|s| s.ty()) == Some(ty.clone()) => {}
                _ => return err(format!("bad constant {value} : {ty}")),
            }
            Ok(ty.clone())
        }
        DTerm::Var(x) => match ctx.lookup(x) {
            Some(ty) => Ok(ty.clone()),
            None => err(format!("unbound variable `{x}`")),
        },
        DTerm::Lam { var, ty, body } => {
            if !ty.is_interpretable() {
                return err(format!("{ty} is outside the fragment"));
            }
            let b = typecheck(&ctx.clone().with(var.clone(), ty.clone()), body)?;
            Ok(Type::arrow(ty.clone(), b))
        }
        DTerm::App(f, a) => match typecheck(ctx, f)? {
            Type::Arrow(d, c) => {
                let ta = typecheck(ctx, a)?;
                if ta == *d {
                    Ok(*c)
                } else {
                    err(format!("argument of type {ta} where {d} is expected"))
                }
            }
            other => err(format!("applying a value of type {other}")),
        },
        DTerm::Add(a, b) | DTerm::Sub(a, b) => {
            let (ta, tb) = (typecheck(ctx, a)?, typecheck(ctx, b)?);
            if ta != tb || !is_addable(&ta) {
                return err(format!("cannot combine {ta} and {tb}"));
            }
            Ok(ta)
        }
        DTerm::Mul(a, b) => {
            let (ta, tb) = (typecheck(ctx, a)?, typecheck(ctx, b)?);
            if !ta.is_base() || !tb.is_base() {
                return err(format!("cannot multiply {ta} and {tb}"));
            }
            Ok(Type::real())
        }
        DTerm::DDer { body, var, at, delta } => {
            let (ta, td) = (typecheck(ctx, at)?, typecheck(ctx, delta)?);
            if ta != td {
                return err(format!("point {ta} and change {td} differ"));
            }
            typecheck(&ctx.clone().with(var.clone(), ta), body)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DRule {
    Beta,
    DConst,
    DVar,
    DLam,
    DApp,
    AddFun,
    SubFun,
}

impl fmt::Display for DRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The zero change of type `ty`.
fn zero(ty: &Type, avoid: &BTreeSet<String>) -> DTerm {
    match ty {
        Type::Arrow(a, b) => {
            let z = fresh_var("z", avoid);
            DTerm::lam(z, (**a).clone(), zero(b, avoid))
        }
        _ => DTerm::num(0),
    }
}

fn root_rule(t: &DTerm) -> Option<DRule> {
    match t {
        DTerm::App(f, _) if matches!(**f, DTerm::Lam { .. }) => Some(DRule::Beta),
        DTerm::DDer { body, var, .. } => match &**body {
            DTerm::Const { .. } => Some(DRule::DConst),
            DTerm::Var(y) if y == var => Some(DRule::DVar),
            DTerm::Lam { .. } => Some(DRule::DLam),
            DTerm::App(..) => Some(DRule::DApp),
            _ => None,
        },
        DTerm::Add(a, b) if matches!((&**a, &**b), (DTerm::Lam { .. }, DTerm::Lam { .. })) => Some(DRule::AddFun),
        DTerm::Sub(a, b) if matches!((&**a, &**b), (DTerm::Lam { .. }, DTerm::Lam { .. })) => Some(DRule::SubFun),
        _ => None,
    }
}

fn contract(t: &DTerm, rule: DRule) -> DTerm {
    match (rule, t) {
        (DRule::Beta, DTerm::App(f, a)) => match &**f {
            DTerm::Lam { var, body, .. } => substitute(body, var, a),
            _ => unreachable!(),
        },
        (DRule::DConst, DTerm::DDer { body, .. }) => {
            let DTerm::Const { ty, .. } = &**body else { unreachable!() };
            let mut avoid = BTreeSet::new();
            all_names(t, &mut avoid);
            zero(ty, &avoid)
        }
        (DRule::DVar, DTerm::DDer { delta, .. }) => (**delta).clone(),
        (DRule::DLam, DTerm::DDer { body, var, at, delta }) => {
            let DTerm::Lam { var: z, ty, body: b } = &**body else { unreachable!() };
            let mut avoid = free_vars(at);
            avoid.extend(free_vars(delta));
            avoid.insert(var.clone());
            let (z, b) = if avoid.contains(z) {
                all_names(b, &mut avoid);
                let n = fresh_like(z, &avoid);
                let b = substitute(b, z, &DTerm::Var(n.clone()));
                (n, b)
            } else {
                (z.clone(), (**b).clone())
            };
            DTerm::lam(z, ty.clone(), DTerm::dder(b, var.clone(), (**at).clone(), (**delta).clone()))
        }
        (DRule::DApp, DTerm::DDer { body, var, at, delta }) => {
            let moved = DTerm::add((**at).clone(), (**delta).clone());
            DTerm::sub(substitute(body, var, &moved), substitute(body, var, at))
        }
        (DRule::AddFun | DRule::SubFun, DTerm::Add(a, b) | DTerm::Sub(a, b)) => {
            let (DTerm::Lam { var: x, ty, body: b1 }, DTerm::Lam { var: y, body: b2, .. }) = (&**a, &**b) else {
                unreachable!()
            };
            let mut avoid = free_vars(a);
            avoid.extend(free_vars(b));
            let z = if avoid.contains(x) || free_vars(b).contains(x) {
                all_names(t, &mut avoid);
                fresh_like(x, &avoid)
            } else {
                x.clone()
            };
            let l = substitute(b1, x, &DTerm::Var(z.clone()));
            let r = substitute(b2, y, &DTerm::Var(z.clone()));
            let body = if rule == DRule::AddFun { DTerm::add(l, r) } else { DTerm::sub(l, r) };
            DTerm::lam(z, ty.clone(), body)
        }
        _ => unreachable!("rule {rule} does not match"),
    }
}

fn find(t: &DTerm, path: &mut Vec<usize>) -> Option<(Vec<usize>, DRule)> {
    if let Some(r) = root_rule(t) {
        return Some((path.clone(), r));
    }
    let order: Vec<usize> = match t {
        DTerm::DDer { .. } => vec![1, 2, 0],
        _ => (0..t.children().len()).collect(),
    };
    let kids = t.children();
    for i in order {
        path.push(i);
        if let Some(found) = find(kids[i], path) {
            return Some(found);
        }
        path.pop();
    }
    None
}

fn replace_at(t: &DTerm, path: &[usize], new: DTerm) -> DTerm {
    let Some((&i, rest)) = path.split_first() else { return new };
    let go = |c: &DTerm| replace_at(c, rest, new.clone());
    match (t, i) {
        (DTerm::Lam { var, ty, body }, 0) => DTerm::lam(var.clone(), ty.clone(), go(body)),
        (DTerm::App(a, b), 0) => DTerm::app(go(a), (**b).clone()),
        (DTerm::App(a, b), 1) => DTerm::app((**a).clone(), go(b)),
        (DTerm::Add(a, b), 0) => DTerm::add(go(a), (**b).clone()),
        (DTerm::Add(a, b), 1) => DTerm::add((**a).clone(), go(b)),
        (DTerm::Sub(a, b), 0) => DTerm::sub(go(a), (**b).clone()),
        (DTerm::Sub(a, b), 1) => DTerm::sub((**a).clone(), go(b)),
        (DTerm::Mul(a, b), 0) => DTerm::mul(go(a), (**b).clone()),
        (DTerm::Mul(a, b), 1) => DTerm::mul((**a).clone(), go(b)),
        (DTerm::DDer { body, var, at, delta }, _) => {
            let (mut b, mut a, mut d) = ((**body).clone(), (**at).clone(), (**delta).clone());
            match i {
                0 => b = go(body),
                1 => a = go(at),
                _ => d = go(delta),
            }
            DTerm::dder(b, var.clone(), a, d)
        }
        _ => unreachable!("invalid path"),
    }
}

fn is_nb(t: &DTerm) -> bool {
    match t {
        DTerm::Const { .. } | DTerm::Var(_) => true,
        DTerm::App(f, a) => is_nb(f) && is_nf(a),
        DTerm::Add(a, b) | DTerm::Sub(a, b) => (is_nb(a) && is_nf(b)) || (is_nf(a) && is_nb(b)),
        DTerm::Mul(a, b) => is_nb(a) && is_nb(b),
        DTerm::DDer { body, at, delta, .. } => is_nb(body) && is_nf(at) && is_nf(delta),
        DTerm::Lam { .. } => false,
    }
}

fn is_nf(t: &DTerm) -> bool {
    matches!(t, DTerm::Lam { .. }) || is_nb(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DStep {
    pub rule: DRule,
    pub path: Vec<usize>,
    pub before: String,
    pub after: String,
}

/// One step of leftmost-outermost reduction, `None` at a normal form.
pub fn discrete_step(t: &DTerm) -> Result<Option<(DTerm, DStep)>, DiscreteError> {
    match find(t, &mut Vec::new()) {
        Some((path, rule)) => {
            let mut cur = t;
            for &i in &path {
                cur = cur.children()[i];
            }
            let after = contract(cur, rule);
            let step = DStep {
                rule,
                path: path.clone(),
                before: cur.to_string(),
                after: after.to_string(),
            };
            Ok(Some((replace_at(t, &path, after), step)))
        }
        None if is_nf(t) => Ok(None),
        None => Err(DiscreteError::StuckTerm(t.to_string())),
    }
}

pub fn discrete_normalize(t: &DTerm, fuel: Fuel) -> Result<(DTerm, Vec<DStep>), DiscreteError> {
    let mut cur = t.clone();
    let mut trace = Vec::new();
    while let Some((next, step)) = discrete_step(&cur)? {
        if trace.len() as u64 >= fuel.remaining {
            return Err(DiscreteError::FuelExhausted(trace.len() as u64));
        }
        cur = next;
        trace.push(step);
    }
    Ok((cur, trace))
}

/// `Derive f = λx. λdx. Δ(f y)/Δy|_{x,dx}`.
pub fn derive_fn(ctx: &TypingContext, f: &DTerm) -> Result<DTerm, DiscreteError> {
    let Type::Arrow(dom, _) = typecheck(ctx, f)? else {
        return Err(DiscreteError::Type("Derive expects a function".into()));
    };
    let mut avoid = ctx.names();
    all_names(f, &mut avoid);
    let mut fresh = |b: &str| {
        let n = fresh_var(b, &avoid);
        avoid.insert(n.clone());
        n
    };
    let (x, dx, y) = (fresh("x"), fresh("dx"), fresh("y"));
    Ok(DTerm::lam(
        x.clone(),
        (*dom).clone(),
        DTerm::lam(
            dx.clone(),
            (*dom).clone(),
            DTerm::dder(DTerm::app(f.clone(), DTerm::var(y.clone())), y, DTerm::var(x), DTerm::var(dx)),
        ),
    ))
}

/// Checks `f (x ⊕ dx) = f x ⊕ (Derive f) x dx`.
pub fn check_defining_equation(
    ctx: &TypingContext,
    f: &DTerm,
    x: &DTerm,
    dx: &DTerm,
    cfg: &EqConfig,
) -> Result<EqOutcome, DiscreteError> {
    let d = derive_fn(ctx, f)?;
    let rhs = DTerm::add(
        DTerm::app(f.clone(), x.clone()),
        DTerm::app(DTerm::app(d, x.clone()), dx.clone()),
    );
    let (rhs_nf, _) = discrete_normalize(&rhs, cfg.fuel)?;
    let lhs = DTerm::app(f.clone(), DTerm::add(x.clone(), dx.clone()));
    let (lhs_nf, _) = discrete_normalize(&lhs, cfg.fuel)?;
    Ok(term_eq(ctx, &to_term(&lhs_nf), &to_term(&rhs_nf), cfg)?)
}

/// Evaluates a closed base-typed discrete term numerically.
pub fn eval_closed(t: &DTerm, fuel: Fuel, env: &BTreeMap<String, f64>) -> Result<f64, DiscreteError> {
    let (nf, _) = discrete_normalize(t, fuel)?;
    let core = crate::reduce::normalize(
        &env.keys().map(|k| (k.clone(), Type::real())).collect(),
        &to_term(&nf),
        fuel,
    )
    .map_err(|e| DiscreteError::StuckTerm(e.to_string()))?;
    let e = crate::embed::embed(&core, PrimTable::shared()).map_err(|e| DiscreteError::Type(e.to_string()))?;
    crate::real::eval(&e, &env.iter().map(|(k, v)| (k.clone(), *v)).collect::<HashMap<_, _>>(), PrimTable::shared())
        .map_err(|e| DiscreteError::Type(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equality::terms_equal;
    use crate::text::parse_term;

    fn d(s: &str) -> DTerm {
        from_term(&parse_term(s).unwrap()).unwrap()
    }

    fn ctx() -> TypingContext {
        TypingContext::new()
            .with("a", Type::real())
            .with("dd", Type::real())
            .with("x", Type::real())
    }

    fn norm(t: &DTerm) -> DTerm {
        discrete_normalize(t, Fuel::default()).unwrap().0
    }

    #[test]
    fn discussion_rules() {
        let c = DTerm::dder(DTerm::num(7), "y", DTerm::var("x"), DTerm::var("dd"));
        assert_eq!(norm(&c), DTerm::num(0));
        let v = DTerm::dder(DTerm::var("y"), "y", DTerm::var("x"), DTerm::var("dd"));
        assert_eq!(norm(&v), DTerm::var("dd"));
        let l = DTerm::dder(d(r"\u:R. u (+) y"), "y", DTerm::var("x"), DTerm::var("dd"));
        let (s, step) = discrete_step(&l).unwrap().unwrap();
        assert_eq!(step.rule, DRule::DLam);
        assert_eq!(s, DTerm::lam("u", Type::real(), DTerm::dder(d("u (+) y"), "y", DTerm::var("x"), DTerm::var("dd"))));
    }

    #[test]
    fn derive_matches_change_theory() {
        let ctx = ctx();
        let cases = [
            (r"\x:R. x", "dd"),
            (r"\x:R. x * x", "(a (+) dd) * (a (+) dd) (-) a * a"),
            (r"\x:R. 5", "0"),
        ];
        for (f, want) in cases {
            let f = d(f);
            let t = DTerm::app(DTerm::app(derive_fn(&ctx, &f).unwrap(), DTerm::var("a")), DTerm::var("dd"));
            let n = to_term(&norm(&t));
            assert!(terms_equal(&ctx, &n, &parse_term(want).unwrap()).unwrap(), "{f}");
        }
    }

    #[test]
    fn function_valued_differences() {
        let ctx = ctx();
        let f = d(r"\x:R. \u:R. u (+) x (+) x");
        let r = check_defining_equation(&ctx, &f, &DTerm::var("a"), &DTerm::var("dd"), &EqConfig::default()).unwrap();
        assert!(r.equal);
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = d(r"\y:R. x (+) y");
        let s = substitute(&t, "x", &DTerm::var("y"));
        let DTerm::Lam { var, .. } = &s else { panic!() };
        assert_ne!(var, "y");
    }
}
