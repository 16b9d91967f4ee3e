//! Random well-typed terms for property testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::discrete::DTerm;
use crate::syntax::{fresh_var, Constant, Term, Type, TypingContext};
use crate::typeck::{derivative_type, is_addable};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub depth: usize,
    pub allow_fix: bool,
    pub allow_sums: bool,
    pub allow_prims: bool,
    /// Whether `D`, `Int` and `*` may appear.
    pub allow_calculus: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            depth: 4,
            allow_fix: false,
            allow_sums: true,
            allow_prims: true,
            allow_calculus: true,
        }
    }
}

/// Free variables handed to generated terms. All have interpretable types.
pub fn default_context() -> TypingContext {
    let r = Type::real;
    TypingContext::new()
        .with("a", r())
        .with("b", r())
        .with("h", Type::arrow(r(), r()))
        .with("k", Type::arrow(r(), Type::arrow(r(), r())))
}

pub fn random_type<R: Rng>(rng: &mut R, depth: usize, cfg: &GenConfig) -> Type {
    if depth == 0 {
        return Type::real();
    }
    match rng.gen_range(0..10) {
        0..=3 => Type::real(),
        4..=6 => {
            let n = rng.gen_range(2..=3);
            Type::product((0..n).map(|_| random_type(rng, depth - 1, cfg)).collect())
        }
        7 | 8 => Type::arrow(random_type(rng, depth - 1, cfg), random_type(rng, depth - 1, cfg)),
        _ if cfg.allow_sums => Type::sum(random_type(rng, depth - 1, cfg), random_type(rng, depth - 1, cfg)),
        _ => Type::real(),
    }
}

pub fn random_constant<R: Rng>(rng: &mut R) -> Term {
    match rng.gen_range(0..6) {
        0 => Term::ratio(rng.gen_range(-3..=3), rng.gen_range(2..=4)),
        _ => Term::num(rng.gen_range(-4..=5)),
    }
}

fn domain<R: Rng>(rng: &mut R) -> Type {
    if rng.gen_bool(0.7) {
        Type::real()
    } else {
        Type::product(vec![Type::real(), Type::real()])
    }
}

pub struct TermGen<'a, R: Rng> {
    pub rng: &'a mut R,
    pub cfg: GenConfig,
    ctx: TypingContext,
    counter: usize,
}

impl<'a, R: Rng> TermGen<'a, R> {
    pub fn new(rng: &'a mut R, cfg: GenConfig, ctx: TypingContext) -> Self {
        TermGen { rng, cfg, ctx, counter: 0 }
    }

    fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        let names = self.ctx.names();
        fresh_var(&format!("{base}{}", self.counter), &names)
    }

    fn bind<T>(&mut self, x: &str, ty: &Type, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push(x, ty.clone());
        let out = f(self);
        self.ctx.pop();
        out
    }

    fn vars_of(&self, ty: &Type) -> Vec<String> {
        let mut seen = std::collections::BTreeSet::new();
        self.ctx
            .bindings()
            .iter()
            .rev()
            .filter(|(x, _)| seen.insert(x.clone()))
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| x.clone())
            .collect()
    }

    /// A term of type `ty` whose size is bounded by `depth`.
    pub fn term(&mut self, ty: &Type, depth: usize) -> Term {
        if depth == 0 {
            return self.leaf(ty);
        }
        loop {
            let choice = self.rng.gen_range(0..15);
            let d = depth - 1;
            let addable = is_addable(ty);
            let t = match choice {
                0 | 1 => self.intro(ty, d),
                2 | 3 => {
                    let arg = random_type(self.rng, 1, &self.cfg.clone());
                    let f = self.term(&Type::arrow(arg.clone(), ty.clone()), d);
                    let a = self.term(&arg, d);
                    Term::app(f, a)
                }
                4 => {
                    let n = self.rng.gen_range(2..=3);
                    let i = self.rng.gen_range(0..n);
                    let items = (0..n)
                        .map(|j| if j == i { ty.clone() } else { random_type(self.rng, 1, &self.cfg.clone()) })
                        .collect();
                    Term::proj(i + 1, self.term(&Type::product(items), d))
                }
                5 if self.cfg.allow_sums => {
                    let st = Type::sum(Type::real(), random_type(self.rng, 1, &self.cfg.clone()));
                    let Type::Sum(l, r) = &st else { unreachable!() };
                    let (l, r) = ((**l).clone(), (**r).clone());
                    let s = self.term(&st, d);
                    let (x, y) = (self.fresh("l"), self.fresh("r"));
                    let bl = self.bind(&x, &l, |g| g.term(ty, d));
                    let br = self.bind(&y, &r, |g| g.term(ty, d));
                    Term::case(s, x, bl, y, br)
                }
                6 | 7 if addable => {
                    let (l, r) = (self.term(ty, d), self.term(ty, d));
                    if choice == 6 {
                        Term::add(l, r)
                    } else {
                        Term::sub(l, r)
                    }
                }
                8 if addable && self.cfg.allow_calculus => {
                    let dom = domain(self.rng);
                    let dt = derivative_type(ty, &dom).expect("domain");
                    let l = self.term(&dt, d);
                    let r = self.term(&dom, d);
                    Term::mul(l, r)
                }
                9 if addable && self.cfg.allow_calculus => {
                    let (dom, body_ty) = match ty {
                        Type::Product(ts) if ts.len() == 2 && ts[0] == ts[1] && self.rng.gen_bool(0.3) => {
                            (Type::product(vec![Type::real(), Type::real()]), ts[0].clone())
                        }
                        _ => (Type::real(), ty.clone()),
                    };
                    let at = self.term(&dom, d);
                    let x = self.fresh("x");
                    let body = self.bind(&x, &dom, |g| g.term(&body_ty, d));
                    Term::der(body, x, at)
                }
                10 if addable && self.cfg.allow_calculus => {
                    let dom = domain(self.rng);
                    let body_ty = derivative_type(ty, &dom).expect("domain");
                    let lo = self.term(&dom, d);
                    let hi = self.term(&dom, d);
                    let x = self.fresh("x");
                    let body = self.bind(&x, &dom, |g| g.term(&body_ty, d));
                    Term::int(lo, hi, body, x)
                }
                11 if self.cfg.allow_fix => {
                    let f = self.term(&Type::arrow(ty.clone(), ty.clone()), d);
                    Term::fix(f)
                }
                12 if self.cfg.allow_prims && ty.is_base() => {
                    let name = *["sin", "cos", "exp"].choose(self.rng).unwrap();
                    let arg = self.term(&Type::real(), d);
                    Term::app(Term::named_const(name, Type::arrow(Type::real(), Type::real())), arg)
                }
                13 | 14 => self.leaf(ty),
                _ => continue,
            };
            return t;
        }
    }

    fn intro(&mut self, ty: &Type, d: usize) -> Term {
        match ty {
            Type::Base(_) => self.leaf(ty),
            Type::Product(ts) => Term::tuple(ts.iter().map(|t| self.term(t, d)).collect()),
            Type::Arrow(a, b) => {
                let x = self.fresh("v");
                let body = self.bind(&x, a, |g| g.term(b, d));
                Term::lam(x, (**a).clone(), body)
            }
            Type::Sum(l, r) => {
                if self.rng.gen_bool(0.5) {
                    Term::inl(self.term(l, d), ty.clone())
                } else {
                    Term::inr(self.term(r, d), ty.clone())
                }
            }
        }
    }

    fn leaf(&mut self, ty: &Type) -> Term {
        let vars = self.vars_of(ty);
        if !vars.is_empty() && self.rng.gen_bool(0.6) {
            return Term::var(vars.choose(self.rng).unwrap().clone());
        }
        match ty {
            Type::Base(_) => random_constant(self.rng),
            _ => self.intro(ty, 0),
        }
    }
}

/// A closed-over-`ctx` term of a random type.
pub fn random_term<R: Rng>(rng: &mut R, cfg: &GenConfig, ctx: &TypingContext) -> (Term, Type) {
    let ty = random_type(rng, 2, cfg);
    let depth = cfg.depth;
    let mut g = TermGen::new(rng, cfg.clone(), ctx.clone());
    (g.term(&ty, depth), ty)
}

/// A polynomial in the given base-typed atoms with small integer coefficients.
pub fn random_polynomial<R: Rng>(rng: &mut R, atoms: &[Term], degree: usize) -> Term {
    let terms = rng.gen_range(1..=3);
    let mut summands = Vec::new();
    for _ in 0..terms {
        let c = rng.gen_range(-3..=4);
        let mut m = Term::num(c);
        for _ in 0..rng.gen_range(0..=degree) {
            m = Term::mul(m, atoms.choose(rng).unwrap().clone());
        }
        summands.push(m);
    }
    let mut out = summands.remove(0);
    for s in summands {
        out = if rng.gen_bool(0.7) { Term::add(out, s) } else { Term::sub(out, s) };
    }
    out
}

fn components(x: &str, n: usize) -> Vec<Term> {
    if n == 1 {
        vec![Term::var(x)]
    } else {
        (1..=n).map(|i| Term::proj(i, Term::var(x))).collect()
    }
}

/// `R^n` for `n > 1`, `R` for `n = 1`.
pub fn real_tuple(n: usize) -> Type {
    if n == 1 {
        Type::real()
    } else {
        Type::product(vec![Type::real(); n])
    }
}

/// A term of type `R^m` polynomial in the components of `x : R^n`.
pub fn random_poly_body<R: Rng>(rng: &mut R, x: &str, n: usize, m: usize, degree: usize) -> Term {
    let atoms = components(x, n);
    let items: Vec<Term> = (0..m).map(|_| random_polynomial(rng, &atoms, degree)).collect();
    if m == 1 {
        items.into_iter().next().unwrap()
    } else {
        Term::tuple(items)
    }
}

/// `λx:R^n. (p_1, ..., p_m)` with polynomial components.
pub fn random_poly_fn<R: Rng>(rng: &mut R, n: usize, m: usize, degree: usize) -> Term {
    Term::lam("x", real_tuple(n), random_poly_body(rng, "x", n, m, degree))
}

/// A point of `R^n` built from small constants.
pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Term {
    let items: Vec<Term> = (0..n).map(|_| Term::num(rng.gen_range(-3..=3))).collect();
    if n == 1 {
        items.into_iter().next().unwrap()
    } else {
        Term::tuple(items)
    }
}

/// A discrete-fragment function `R -> R` or `R -> R -> R`.
pub fn random_discrete_fn<R: Rng>(rng: &mut R) -> DTerm {
    fn body<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> DTerm {
        if depth == 0 || rng.gen_bool(0.25) {
            return if rng.gen_bool(0.6) {
                DTerm::var(*vars.choose(rng).unwrap())
            } else {
                DTerm::num(rng.gen_range(-3..=4))
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..5) {
            0 => DTerm::add(body(rng, vars, d), body(rng, vars, d)),
            1 => DTerm::sub(body(rng, vars, d), body(rng, vars, d)),
            2 => DTerm::mul(body(rng, vars, d), body(rng, vars, d)),
            3 => {
                let inner = DTerm::lam("w", Type::real(), body(rng, &[vars, &["w"]].concat(), d));
                DTerm::app(inner, body(rng, vars, d))
            }
            _ => DTerm::app(
                DTerm::Const {
                    value: Constant::Named("exp".into()),
                    ty: Type::arrow(Type::real(), Type::real()),
                },
                body(rng, vars, d),
            ),
        }
    }
    if rng.gen_bool(0.7) {
        DTerm::lam("x", Type::real(), body(rng, &["x"], 3))
    } else {
        DTerm::lam(
            "x",
            Type::real(),
            DTerm::lam("u", Type::real(), body(rng, &["x", "u"], 3)),
        )
    }
}

/// A polynomial discrete program `R -> R`.
pub fn random_discrete_poly<R: Rng>(rng: &mut R) -> DTerm {
    let t = random_polynomial(rng, &[Term::var("x")], 3);
    DTerm::lam("x", Type::real(), crate::discrete::from_term(&t).expect("polynomial"))
}
