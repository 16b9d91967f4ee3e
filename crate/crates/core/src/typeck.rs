//! The typing rules, addable types and derivative types.

use std::fmt;

use thiserror::Error;

use crate::real::PrimTable;
use crate::syntax::{Constant, Term, Type, TypingContext, REAL};
use crate::text::{print_term, Style};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    UnboundVariable,
    ArityMismatch,
    NotAddable,
    NoDerivativeType,
    ApplicationMismatch,
    BranchMismatch,
    ProjectionOutOfRange,
    AnnotationRequired,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A failed premise of a typing rule.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule}: expected {expected}, found {found} in {}", excerpt(.term))]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub rule: &'static str,
    pub term: Box<Term>,
    pub expected: String,
    pub found: String,
}

const EXCERPT_LEN: usize = 60;

fn excerpt(t: &Term) -> String {
    let s = print_term(t, Style::ASCII);
    if s.chars().count() <= EXCERPT_LEN {
        s
    } else {
        let mut out: String = s.chars().take(EXCERPT_LEN - 3).collect();
        out.push_str("...");
        out
    }
}

impl TypeError {
    fn new(
        kind: TypeErrorKind,
        rule: &'static str,
        term: &Term,
        expected: impl fmt::Display,
        found: impl fmt::Display,
    ) -> Self {
        TypeError {
            kind,
            rule,
            term: Box::new(term.clone()),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

/// Types generated by `T* ::= B | (T*, ..., T*) | T -> T*`.
pub fn is_addable(ty: &Type) -> bool {
    match ty {
        Type::Base(_) => true,
        Type::Product(ts) => ts.iter().all(is_addable),
        Type::Arrow(_, cod) => is_addable(cod),
        Type::Sum(..) => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no derivative type with respect to {denominator}")]
pub struct NoDerivativeType {
    pub denominator: Type,
}

/// `∂T/∂T0`: `T` for a base denominator, componentwise for a product.
pub fn derivative_type(ty: &Type, wrt: &Type) -> Result<Type, NoDerivativeType> {
    match wrt {
        Type::Base(_) => Ok(ty.clone()),
        Type::Product(ts) => Ok(Type::Product(
            ts.iter()
                .map(|t| derivative_type(ty, t))
                .collect::<Result<_, _>>()?,
        )),
        _ => Err(NoDerivativeType {
            denominator: wrt.clone(),
        }),
    }
}

/// The `T*` with `∂T*/∂wrt = d`, if any. Unique because `derivative_type` is
/// injective in its first argument.
pub fn integrate_type(d: &Type, wrt: &Type) -> Option<Type> {
    match wrt {
        Type::Base(_) => Some(d.clone()),
        Type::Product(ws) => {
            let Type::Product(ds) = d else { return None };
            if ds.len() != ws.len() {
                return None;
            }
            let mut found: Option<Type> = None;
            for (di, wi) in ds.iter().zip(ws) {
                let t = integrate_type(di, wi)?;
                match &found {
                    Some(prev) if *prev != t => return None,
                    _ => found = Some(t),
                }
            }
            found
        }
        _ => None,
    }
}

/// Checks `t` against the standard primitive table.
pub fn typecheck(ctx: &TypingContext, t: &Term) -> Result<Type, TypeError> {
    typecheck_with(ctx, t, PrimTable::shared())
}

pub fn typecheck_with(ctx: &TypingContext, t: &Term, prims: &PrimTable) -> Result<Type, TypeError> {
    let mut ctx = ctx.clone();
    Checker { prims }.check(&mut ctx, t)
}

struct Checker<'a> {
    prims: &'a PrimTable,
}

use TypeErrorKind::*;

impl Checker<'_> {
    fn under(&self, ctx: &mut TypingContext, x: &str, ty: Type, t: &Term) -> Result<Type, TypeError> {
        ctx.push(x, ty);
        let r = self.check(ctx, t);
        ctx.pop();
        r
    }

    fn check(&self, ctx: &mut TypingContext, t: &Term) -> Result<Type, TypeError> {
        match t {
            Term::Const { value, ty } => match value {
                Constant::Num(_) => {
                    if *ty == Type::real() {
                        Ok(ty.clone())
                    } else {
                        Err(TypeError::new(ApplicationMismatch, "TCon", t, REAL, ty))
                    }
                }
                Constant::Named(name) => match self.prims.get(name) {
                    None => Err(TypeError::new(
                        UnboundVariable,
                        "TCon",
                        t,
                        "a registered primitive",
                        format!("unknown constant `{name}`"),
                    )),
                    Some(sig) if sig.ty() != *ty => {
                        Err(TypeError::new(ApplicationMismatch, "TCon", t, sig.ty(), ty))
                    }
                    Some(_) => Ok(ty.clone()),
                },
            },
            Term::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| {
                TypeError::new(
                    UnboundVariable,
                    "TVar",
                    t,
                    "a bound variable",
                    format!("unbound `{x}`"),
                )
            }),
            Term::Lam { var, ty, body } => {
                let cod = self.under(ctx, var, ty.clone(), body)?;
                Ok(Type::arrow(ty.clone(), cod))
            }
            Term::App(f, a) => {
                let tf = self.check(ctx, f)?;
                let Type::Arrow(dom, cod) = tf else {
                    return Err(TypeError::new(ApplicationMismatch, "TApp", t, "a function type", tf));
                };
                let ta = self.check(ctx, a)?;
                if ta != *dom {
                    return Err(TypeError::new(ApplicationMismatch, "TApp", t, dom, ta));
                }
                Ok(*cod)
            }
            Term::Tuple(items) => {
                if items.len() < 2 {
                    return Err(TypeError::new(
                        ArityMismatch,
                        "TPair",
                        t,
                        "at least 2 components",
                        items.len(),
                    ));
                }
                Ok(Type::Product(
                    items
                        .iter()
                        .map(|i| self.check(ctx, i))
                        .collect::<Result<_, _>>()?,
                ))
            }
            Term::Proj { index, tuple } => {
                let tt = self.check(ctx, tuple)?;
                match &tt {
                    Type::Product(ts) if (1..=ts.len()).contains(index) => Ok(ts[index - 1].clone()),
                    Type::Product(ts) => Err(TypeError::new(
                        ProjectionOutOfRange,
                        "TProj",
                        t,
                        format!("an index in 1..{}", ts.len()),
                        index,
                    )),
                    _ => Err(TypeError::new(ProjectionOutOfRange, "TProj", t, "a product type", tt)),
                }
            }
            Term::Add(l, r) | Term::Sub(l, r) => {
                let rule = if matches!(t, Term::Add(..)) { "TAdd" } else { "TSub" };
                let tl = self.check(ctx, l)?;
                let tr = self.check(ctx, r)?;
                if !is_addable(&tl) {
                    return Err(TypeError::new(NotAddable, rule, t, "an addable type", tl));
                }
                if tl != tr {
                    return Err(TypeError::new(ApplicationMismatch, rule, t, tl, tr));
                }
                Ok(tl)
            }
            Term::Mul(l, r) => {
                let tr = self.check(ctx, r)?;
                let tl = self.check(ctx, l)?;
                if !tr.is_differentiable_domain() {
                    return Err(TypeError::new(
                        NoDerivativeType,
                        "TMul",
                        t,
                        "a type without arrows or sums",
                        tr,
                    ));
                }
                let star = integrate_type(&tl, &tr).ok_or_else(|| {
                    TypeError::new(
                        ApplicationMismatch,
                        "TMul",
                        t,
                        format!("a derivative type with respect to {tr}"),
                        &tl,
                    )
                })?;
                if !is_addable(&star) {
                    return Err(TypeError::new(NotAddable, "TMul", t, "an addable type", star));
                }
                Ok(star)
            }
            Term::Der { body, var, at } => {
                let t1 = self.check(ctx, at)?;
                let t2 = self.under(ctx, var, t1.clone(), body)?;
                derivative_type(&t2, &t1).map_err(|_| {
                    TypeError::new(
                        NoDerivativeType,
                        "TDer",
                        t,
                        "a type without arrows or sums",
                        &t1,
                    )
                })
            }
            Term::Int { lo, hi, body, var } => {
                let tl = self.check(ctx, lo)?;
                let th = self.check(ctx, hi)?;
                if tl != th {
                    return Err(TypeError::new(ApplicationMismatch, "TInt", t, &tl, th));
                }
                if !tl.is_differentiable_domain() {
                    return Err(TypeError::new(
                        NoDerivativeType,
                        "TInt",
                        t,
                        "a type without arrows or sums",
                        tl,
                    ));
                }
                let d = self.under(ctx, var, tl.clone(), body)?;
                let star = integrate_type(&d, &tl).ok_or_else(|| {
                    TypeError::new(
                        ApplicationMismatch,
                        "TInt",
                        t,
                        format!("a derivative type with respect to {tl}"),
                        &d,
                    )
                })?;
                if !is_addable(&star) {
                    return Err(TypeError::new(NotAddable, "TInt", t, "an addable type", star));
                }
                Ok(star)
            }
            Term::Inl { term, ty } | Term::Inr { term, ty } => {
                let left = matches!(t, Term::Inl { .. });
                let rule = if left { "TInl" } else { "TInr" };
                let Type::Sum(a, b) = ty else {
                    return Err(TypeError::new(AnnotationRequired, rule, t, "a sum type annotation", ty));
                };
                let want = if left { a } else { b };
                let got = self.check(ctx, term)?;
                if got != **want {
                    return Err(TypeError::new(ApplicationMismatch, rule, t, want, got));
                }
                Ok(ty.clone())
            }
            Term::Case {
                scrutinee,
                left_var,
                left,
                right_var,
                right,
            } => {
                let ts = self.check(ctx, scrutinee)?;
                let Type::Sum(a, b) = ts else {
                    return Err(TypeError::new(ApplicationMismatch, "TCase", t, "a sum type", ts));
                };
                let tl = self.under(ctx, left_var, *a, left)?;
                let tr = self.under(ctx, right_var, *b, right)?;
                if tl != tr {
                    return Err(TypeError::new(BranchMismatch, "TCase", t, tl, tr));
                }
                Ok(tl)
            }
            Term::Fix(f) => {
                let tf = self.check(ctx, f)?;
                match tf {
                    Type::Arrow(a, b) if a == b => Ok(*a),
                    other => Err(TypeError::new(ApplicationMismatch, "TFix", t, "a type T -> T", other)),
                }
            }
        }
    }
}

/// The type of a term assumed well typed. Skips every premise that does not
/// determine the result, so it is cheap enough to call on each reduction step.
pub fn type_of(ctx: &mut TypingContext, t: &Term) -> Option<Type> {
    fn under(ctx: &mut TypingContext, x: &str, ty: Type, t: &Term) -> Option<Type> {
        ctx.push(x, ty);
        let r = type_of(ctx, t);
        ctx.pop();
        r
    }
    match t {
        Term::Const { ty, .. } => Some(ty.clone()),
        Term::Var(x) => ctx.lookup(x).cloned(),
        Term::Lam { var, ty, body } => Some(Type::arrow(ty.clone(), under(ctx, var, ty.clone(), body)?)),
        Term::App(f, _) => match type_of(ctx, f)? {
            Type::Arrow(_, cod) => Some(*cod),
            _ => None,
        },
        Term::Tuple(items) => Some(Type::Product(
            items.iter().map(|i| type_of(ctx, i)).collect::<Option<_>>()?,
        )),
        Term::Proj { index, tuple } => match type_of(ctx, tuple)? {
            Type::Product(mut ts) if (1..=ts.len()).contains(index) => Some(ts.swap_remove(index - 1)),
            _ => None,
        },
        Term::Add(l, _) | Term::Sub(l, _) => type_of(ctx, l),
        Term::Mul(l, r) => {
            let tr = type_of(ctx, r)?;
            integrate_type(&type_of(ctx, l)?, &tr)
        }
        Term::Der { body, var, at } => {
            let t1 = type_of(ctx, at)?;
            let t2 = under(ctx, var, t1.clone(), body)?;
            derivative_type(&t2, &t1).ok()
        }
        Term::Int { lo, body, var, .. } => {
            let tl = type_of(ctx, lo)?;
            let d = under(ctx, var, tl.clone(), body)?;
            integrate_type(&d, &tl)
        }
        Term::Inl { ty, .. } | Term::Inr { ty, .. } => Some(ty.clone()),
        Term::Case {
            scrutinee,
            left_var,
            left,
            ..
        } => match type_of(ctx, scrutinee)? {
            Type::Sum(a, _) => under(ctx, left_var, *a, left),
            _ => None,
        },
        Term::Fix(f) => match type_of(ctx, f)? {
            Type::Arrow(a, _) => Some(*a),
            _ => None,
        },
    }
}
