//! Interpretation of base-type normal forms as real expressions, and back.

use std::collections::{BTreeSet, HashMap};

use num::{BigRational, Signed};

use crate::real::{sym_diff, sym_integrate, PrimTable, RealError, RealExpr};
use crate::syntax::{fresh_var, Constant, Term, Type, TypingContext};
use crate::text::{print_term, Style};
use crate::typeck::type_of;

/// Interprets an interpretable term of base type. Free base variables stay
/// symbolic and free function variables become uninterpreted applications.
pub fn embed(t: &Term, prims: &PrimTable) -> Result<RealExpr, RealError> {
    let mut e = Embedder {
        prims,
        env: HashMap::new(),
        counter: 0,
    };
    Ok(e.go(t, &[])?.canonical())
}

struct Embedder<'a> {
    prims: &'a PrimTable,
    env: HashMap<String, RealExpr>,
    counter: usize,
}

fn not_interpretable(t: &Term) -> RealError {
    RealError::NotInterpretable(print_term(t, Style::ASCII))
}

impl Embedder<'_> {
    fn bind<T>(&mut self, x: &str, v: RealExpr, f: impl FnOnce(&mut Self) -> T) -> T {
        let old = self.env.insert(x.to_string(), v);
        let r = f(self);
        match old {
            Some(o) => self.env.insert(x.to_string(), o),
            None => self.env.remove(x),
        };
        r
    }

    fn fresh(&mut self) -> String {
        self.counter += 1;
        format!("%{}", self.counter)
    }

    /// Interprets `t` applied to `args`.
    fn go(&mut self, t: &Term, args: &[RealExpr]) -> Result<RealExpr, RealError> {
        match t {
            Term::Const { value, .. } => match value {
                Constant::Num(r) if args.is_empty() => Ok(RealExpr::Rat(r.clone())),
                Constant::Num(_) => Err(not_interpretable(t)),
                Constant::Named(name) => {
                    let sig = self
                        .prims
                        .get(name)
                        .ok_or_else(|| RealError::UnsupportedPrimitive(name.clone()))?;
                    if sig.arity != args.len() {
                        return Err(not_interpretable(t));
                    }
                    Ok(self.prims.apply(name, args.to_vec()))
                }
            },
            Term::Var(x) => match self.env.get(x) {
                Some(v) if args.is_empty() => Ok(v.clone()),
                Some(_) => Err(not_interpretable(t)),
                None if args.is_empty() => Ok(RealExpr::Var(x.clone())),
                None => Ok(RealExpr::Apply {
                    name: x.clone(),
                    partials: vec![],
                    args: args.to_vec(),
                }),
            },
            Term::Lam { var, body, .. } => match args.split_first() {
                Some((a, rest)) => self.bind(var, a.clone(), |s| s.go(body, rest)),
                None => Err(not_interpretable(t)),
            },
            Term::App(f, a) => {
                let a = self.go(a, &[])?;
                let mut all = Vec::with_capacity(args.len() + 1);
                all.push(a);
                all.extend_from_slice(args);
                self.go(f, &all)
            }
            Term::Add(l, r) => Ok(RealExpr::add(self.go(l, args)?, self.go(r, args)?)),
            Term::Sub(l, r) => Ok(RealExpr::sub(self.go(l, args)?, self.go(r, args)?)),
            Term::Mul(l, r) => Ok(RealExpr::mul(self.go(l, args)?, self.go(r, &[])?)),
            Term::Der { body, var, at } => {
                let at = self.go(at, &[])?;
                let z = self.fresh();
                let e = self.bind(var, RealExpr::var(z.clone()), |s| s.go(body, args))?;
                Ok(sym_diff(&e.canonical(), &z, self.prims)?.subst1(&z, &at))
            }
            Term::Int { lo, hi, body, var } => {
                let lo = self.go(lo, &[])?;
                let hi = self.go(hi, &[])?;
                let z = self.fresh();
                let e = self.bind(var, RealExpr::var(z.clone()), |s| s.go(body, args))?;
                sym_integrate(&e.canonical(), &z, &lo, &hi, self.prims)
            }
            _ => Err(not_interpretable(t)),
        }
    }
}

/// Reads a real expression back as a term of type `R`.
pub fn real_to_term(e: &RealExpr, prims: &PrimTable) -> Term {
    let mut avoid = BTreeSet::new();
    collect_names(e, &mut avoid);
    back(e, prims, &mut avoid)
}

fn collect_names(e: &RealExpr, out: &mut BTreeSet<String>) {
    out.extend(e.free_vars());
    if let RealExpr::Apply { name, .. } = e {
        out.insert(name.clone());
    }
}

/// Splits a negative leading coefficient off a summand.
fn negated(e: &RealExpr) -> Option<RealExpr> {
    match e {
        RealExpr::Neg(x) => Some((**x).clone()),
        RealExpr::Rat(r) if r.is_negative() => Some(RealExpr::Rat(-r)),
        RealExpr::Prod(fs) => match fs.first() {
            Some(RealExpr::Rat(r)) if r.is_negative() => {
                let mut fs = fs.clone();
                let c = -r;
                if c == BigRational::from_integer(1.into()) {
                    fs.remove(0);
                } else {
                    fs[0] = RealExpr::Rat(c);
                }
                Some(if fs.len() == 1 { fs.pop().expect("one") } else { RealExpr::Prod(fs) })
            }
            _ => None,
        },
        _ => None,
    }
}

fn back(e: &RealExpr, prims: &PrimTable, avoid: &mut BTreeSet<String>) -> Term {
    let r = Type::real();
    let unary = |name: &str, x: &RealExpr, avoid: &mut BTreeSet<String>| {
        Term::app(Term::named_const(name, Type::arrow(r.clone(), r.clone())), back(x, prims, avoid))
    };
    match e {
        RealExpr::Rat(q) => Term::rational(q.clone()),
        RealExpr::Var(v) => Term::var(v.clone()),
        RealExpr::Sum(xs) => {
            let mut acc: Option<Term> = None;
            for x in xs {
                acc = Some(match (acc, negated(x)) {
                    (Some(a), Some(n)) => Term::sub(a, back(&n, prims, avoid)),
                    (Some(a), None) => Term::add(a, back(x, prims, avoid)),
                    (None, _) => back(x, prims, avoid),
                });
            }
            acc.unwrap_or_else(|| Term::num(0))
        }
        RealExpr::Neg(x) => Term::mul(Term::num(-1), back(x, prims, avoid)),
        RealExpr::Prod(xs) => {
            let mut factors = Vec::new();
            for x in xs {
                match x {
                    RealExpr::Pow(b, k) => {
                        let b = back(b, prims, avoid);
                        factors.extend(std::iter::repeat_n(b, *k as usize));
                    }
                    _ => factors.push(back(x, prims, avoid)),
                }
            }
            let mut it = factors.into_iter();
            let first = it.next().unwrap_or_else(|| Term::num(1));
            it.fold(first, Term::mul)
        }
        RealExpr::Pow(x, k) => {
            let b = back(x, prims, avoid);
            (1..*k).fold(b.clone(), |acc, _| Term::mul(acc, b.clone()))
        }
        RealExpr::Sin(x) => unary("sin", x, avoid),
        RealExpr::Cos(x) => unary("cos", x, avoid),
        RealExpr::Exp(x) => unary("exp", x, avoid),
        RealExpr::Prim(name, args) => {
            let ty = prims.get(name).map(|s| s.ty()).unwrap_or_else(|| {
                (0..args.len()).fold(r.clone(), |acc, _| Type::arrow(r.clone(), acc))
            });
            args.iter()
                .fold(Term::named_const(name.clone(), ty), |f, a| Term::app(f, back(a, prims, avoid)))
        }
        RealExpr::Apply {
            name,
            partials,
            args,
        } => {
            let args: Vec<Term> = args.iter().map(|a| back(a, prims, avoid)).collect();
            apply_back(name, partials, args, avoid)
        }
    }
}

/// `∂^k f / ∂x_{p1} ... ∂x_{pk}` at `args`, as nested derivative terms.
fn apply_back(name: &str, partials: &[usize], mut args: Vec<Term>, avoid: &mut BTreeSet<String>) -> Term {
    match partials.split_last() {
        None => args.into_iter().fold(Term::var(name), Term::app),
        Some((&p, rest)) => {
            let z = fresh_var("z", avoid);
            avoid.insert(z.clone());
            let at = std::mem::replace(&mut args[p], Term::var(z.clone()));
            Term::der(apply_back(name, rest, args, avoid), z, at)
        }
    }
}

/// Replaces each base-typed part of a normal form by the canonical form of
/// its interpretation, leaving anything uninterpretable as it was.
pub fn simplify(ctx: &TypingContext, t: &Term, prims: &PrimTable) -> Term {
    let mut ctx = ctx.clone();
    simplify_rec(&mut ctx, t, prims)
}

fn simplify_rec(ctx: &mut TypingContext, t: &Term, prims: &PrimTable) -> Term {
    match t {
        Term::Tuple(items) => Term::Tuple(items.iter().map(|i| simplify_rec(ctx, i, prims)).collect()),
        Term::Inl { term, ty } => Term::inl(simplify_rec(ctx, term, prims), ty.clone()),
        Term::Inr { term, ty } => Term::inr(simplify_rec(ctx, term, prims), ty.clone()),
        Term::Lam { var, ty, body } => {
            ctx.push(var, ty.clone());
            let b = simplify_rec(ctx, body, prims);
            ctx.pop();
            Term::lam(var.clone(), ty.clone(), b)
        }
        _ if type_of(ctx, t).is_some_and(|ty| ty.is_base()) => match embed(t, prims) {
            Ok(e) => real_to_term(&e, prims),
            _ => t.clone(),
        },
        _ => t.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::parse_infix;
    use crate::text::parse_term;

    fn emb(s: &str) -> RealExpr {
        embed(&parse_term(s).unwrap(), PrimTable::shared()).unwrap()
    }

    fn infix(s: &str) -> RealExpr {
        parse_infix(s).unwrap().canonical()
    }

    #[test]
    fn basic_embedding() {
        assert_eq!(emb("3 (+) x"), RealExpr::Sum(vec![RealExpr::int(3), RealExpr::var("x")]));
        assert_eq!(emb("(a (+) b) (-) b"), RealExpr::var("a"));
        assert_eq!(
            emb("D{ x * x ; x @ c }"),
            RealExpr::Prod(vec![RealExpr::int(2), RealExpr::var("c")])
        );
    }

    #[test]
    fn lambdas_and_primitives() {
        assert_eq!(emb(r"(\x:R. x * x (+) sin x) 3"), infix("9 + sin(3)"));
        assert_eq!(emb(r"((\x:R. x) (+) (\y:R. y * y)) a"), infix("a + a^2"));
        assert_eq!(emb(r"D{ \y:R. x * y ; x @ 2 } 5"), infix("5"));
    }

    #[test]
    fn integrals_and_function_variables() {
        assert_eq!(emb("Int{ D{ x * x * x ; x @ t } dt ; 0 .. 2 }"), infix("8"));
        assert_eq!(emb("Int{ D{ g x ; x @ t } dt ; a .. b }"), infix("g(b) + -g(a)"));
        assert_eq!(emb("D{ g (x * x) ; x @ c }"), infix("2*c*g[0](c^2)"));
    }

    #[test]
    fn rejects_structured_terms() {
        assert!(embed(&parse_term("(1,2)").unwrap(), PrimTable::shared()).is_err());
        assert!(embed(&parse_term(r"\x:R. x").unwrap(), PrimTable::shared()).is_err());
    }

    #[test]
    fn read_back_round_trips() {
        for s in ["1 + -1/2*x^2 + x*y", "sin(x) + -cos(2*x)", "g[0,1](a, b) + g(a, b)", "-(x)"] {
            let e = infix(s);
            let t = real_to_term(&e, PrimTable::shared());
            assert_eq!(embed(&t, PrimTable::shared()).unwrap(), e, "{s}");
        }
        let t = real_to_term(&infix("1 + dr + -1/2*dth^2"), PrimTable::shared());
        assert_eq!(t.to_string(), "1 (+) dr (-) 1/2 * dth * dth");
    }

    #[test]
    fn simplify_normal_form() {
        let t = parse_term("(1 * 7 (+) 2 * 8 (+) 3 * 9,4 * 7 (+) 5 * 8 (+) 6 * 9)").unwrap();
        assert_eq!(simplify(&TypingContext::new(), &t, PrimTable::shared()).to_string(), "(50,122)");
    }
}
