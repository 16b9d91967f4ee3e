//! Symbolic real expressions: the interpreter for the base type `R`.
//!
//! Canonical form is a sum of monomials over "atoms" (variables and
//! transcendental or opaque applications whose own arguments are canonical),
//! with exact rational coefficients.

mod calculus;
mod format;
mod prims;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use calculus::{antiderivative, sym_diff, sym_integrate};
pub use format::{parse_infix, parse_sexpr, print_infix, print_sexpr};
pub use prims::{inverse_factorial, placeholder, PrimTable, PrimitiveSignature};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RealExpr {
    Rat(BigRational),
    Var(String),
    Sum(Vec<RealExpr>),
    Neg(Box<RealExpr>),
    Prod(Vec<RealExpr>),
    Pow(Box<RealExpr>, u32),
    Sin(Box<RealExpr>),
    Cos(Box<RealExpr>),
    Exp(Box<RealExpr>),
    /// A registered primitive applied to all of its arguments.
    Prim(String, Vec<RealExpr>),
    /// An unknown function variable, differentiated once per entry of `partials`
    /// (argument indices, kept sorted), then applied to `args`.
    Apply {
        name: String,
        partials: Vec<usize>,
        args: Vec<RealExpr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unsupported primitive `{0}`")]
    UnsupportedPrimitive(String),
    #[error("cannot integrate {expr} with respect to {var}")]
    IntegrationUnsupported { expr: String, var: String },
    #[error("term is not interpretable on the base type: {0}")]
    NotInterpretable(String),
}

impl RealExpr {
    pub fn int(n: i64) -> RealExpr {
        RealExpr::Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> RealExpr {
        RealExpr::Rat(BigRational::zero())
    }

    pub fn one() -> RealExpr {
        RealExpr::Rat(BigRational::one())
    }

    pub fn var(name: impl Into<String>) -> RealExpr {
        RealExpr::Var(name.into())
    }

    pub fn add(a: RealExpr, b: RealExpr) -> RealExpr {
        RealExpr::Sum(vec![a, b])
    }

    pub fn sub(a: RealExpr, b: RealExpr) -> RealExpr {
        RealExpr::Sum(vec![a, RealExpr::Neg(Box::new(b))])
    }

    pub fn mul(a: RealExpr, b: RealExpr) -> RealExpr {
        RealExpr::Prod(vec![a, b])
    }

    pub fn pow(a: RealExpr, k: u32) -> RealExpr {
        RealExpr::Pow(Box::new(a), k)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RealExpr::Rat(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RealExpr::Rat(r) => Some(r),
            _ => None,
        }
    }

    fn children(&self) -> Vec<&RealExpr> {
        match self {
            RealExpr::Rat(_) | RealExpr::Var(_) => vec![],
            RealExpr::Sum(xs) | RealExpr::Prod(xs) => xs.iter().collect(),
            RealExpr::Neg(e) | RealExpr::Pow(e, _) | RealExpr::Sin(e) | RealExpr::Cos(e) | RealExpr::Exp(e) => {
                vec![e]
            }
            RealExpr::Prim(_, args) | RealExpr::Apply { args, .. } => args.iter().collect(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let RealExpr::Var(v) = self {
            out.insert(v.clone());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            RealExpr::Var(v) => v == x,
            _ => self.children().iter().any(|c| c.mentions(x)),
        }
    }

    /// True if a registered opaque primitive occurs anywhere.
    pub fn has_prim(&self) -> bool {
        matches!(self, RealExpr::Prim(..)) || self.children().iter().any(|c| c.has_prim())
    }

    /// True if `sin`, `cos`, `exp` or an opaque primitive occurs anywhere.
    pub fn has_transcendental(&self) -> bool {
        matches!(self, RealExpr::Sin(_) | RealExpr::Cos(_) | RealExpr::Exp(_) | RealExpr::Prim(..))
            || self.children().iter().any(|c| c.has_transcendental())
    }

    pub fn has_apply(&self) -> bool {
        matches!(self, RealExpr::Apply { .. }) || self.children().iter().any(|c| c.has_apply())
    }

    /// Replaces variables simultaneously; the result is not canonicalized.
    pub fn subst(&self, map: &HashMap<String, RealExpr>) -> RealExpr {
        let s = |e: &RealExpr| e.subst(map);
        match self {
            RealExpr::Rat(_) => self.clone(),
            RealExpr::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            RealExpr::Sum(xs) => RealExpr::Sum(xs.iter().map(s).collect()),
            RealExpr::Prod(xs) => RealExpr::Prod(xs.iter().map(s).collect()),
            RealExpr::Neg(e) => RealExpr::Neg(Box::new(s(e))),
            RealExpr::Pow(e, k) => RealExpr::Pow(Box::new(s(e)), *k),
            RealExpr::Sin(e) => RealExpr::Sin(Box::new(s(e))),
            RealExpr::Cos(e) => RealExpr::Cos(Box::new(s(e))),
            RealExpr::Exp(e) => RealExpr::Exp(Box::new(s(e))),
            RealExpr::Prim(n, args) => RealExpr::Prim(n.clone(), args.iter().map(s).collect()),
            RealExpr::Apply {
                name,
                partials,
                args,
            } => RealExpr::Apply {
                name: name.clone(),
                partials: partials.clone(),
                args: args.iter().map(s).collect(),
            },
        }
    }

    pub fn subst1(&self, x: &str, v: &RealExpr) -> RealExpr {
        let mut map = HashMap::new();
        map.insert(x.to_string(), v.clone());
        self.subst(&map)
    }

    pub fn canonical(&self) -> RealExpr {
        from_poly(&to_poly(self))
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }
}

pub(crate) type Monomial = BTreeMap<RealExpr, u32>;
pub(crate) type Poly = BTreeMap<Monomial, BigRational>;

fn poly_const(c: BigRational) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(Monomial::new(), c);
    }
    p
}

fn poly_atom(a: RealExpr) -> Poly {
    let mut m = Monomial::new();
    m.insert(a, 1);
    let mut p = Poly::new();
    p.insert(m, BigRational::one());
    p
}

fn poly_add_into(acc: &mut Poly, other: &Poly, scale: &BigRational) {
    for (m, c) in other {
        let entry = acc.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c * scale;
        if entry.is_zero() {
            acc.remove(m);
        }
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            for (atom, k) in mb {
                *m.entry(atom.clone()).or_insert(0) += k;
            }
            let entry = out.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += ca * cb;
            if entry.is_zero() {
                out.remove(&m);
            }
        }
    }
    out
}

fn poly_pow(p: &Poly, k: u32) -> Poly {
    let mut out = poly_const(BigRational::one());
    let mut base = p.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = poly_mul(&out, &base);
        }
        k >>= 1;
        if k > 0 {
            base = poly_mul(&base, &base);
        }
    }
    out
}

pub(crate) fn to_poly(e: &RealExpr) -> Poly {
    match e {
        RealExpr::Rat(r) => poly_const(r.clone()),
        RealExpr::Var(_) => poly_atom(e.clone()),
        RealExpr::Sum(xs) => {
            let mut acc = Poly::new();
            for x in xs {
                poly_add_into(&mut acc, &to_poly(x), &BigRational::one());
            }
            acc
        }
        RealExpr::Neg(x) => {
            let mut acc = Poly::new();
            poly_add_into(&mut acc, &to_poly(x), &-BigRational::one());
            acc
        }
        RealExpr::Prod(xs) => xs
            .iter()
            .fold(poly_const(BigRational::one()), |acc, x| poly_mul(&acc, &to_poly(x))),
        RealExpr::Pow(x, k) => poly_pow(&to_poly(x), *k),
        RealExpr::Sin(x) | RealExpr::Cos(x) | RealExpr::Exp(x) => {
            let inner = x.canonical();
            if inner.is_zero() {
                return match e {
                    RealExpr::Sin(_) => Poly::new(),
                    _ => poly_const(BigRational::one()),
                };
            }
            poly_atom(match e {
                RealExpr::Sin(_) => RealExpr::Sin(Box::new(inner)),
                RealExpr::Cos(_) => RealExpr::Cos(Box::new(inner)),
                _ => RealExpr::Exp(Box::new(inner)),
            })
        }
        RealExpr::Prim(n, args) => {
            poly_atom(RealExpr::Prim(n.clone(), args.iter().map(RealExpr::canonical).collect()))
        }
        RealExpr::Apply {
            name,
            partials,
            args,
        } => {
            let mut partials = partials.clone();
            partials.sort_unstable();
            poly_atom(RealExpr::Apply {
                name: name.clone(),
                partials,
                args: args.iter().map(RealExpr::canonical).collect(),
            })
        }
    }
}

pub(crate) fn from_poly(p: &Poly) -> RealExpr {
    let mut terms: Vec<RealExpr> = p.iter().map(|(m, c)| monomial_expr(m, c)).collect();
    match terms.len() {
        0 => RealExpr::zero(),
        1 => terms.pop().expect("one term"),
        _ => RealExpr::Sum(terms),
    }
}

fn monomial_expr(m: &Monomial, c: &BigRational) -> RealExpr {
    if m.is_empty() {
        return RealExpr::Rat(c.clone());
    }
    let mut factors: Vec<RealExpr> = Vec::with_capacity(m.len() + 1);
    if !c.is_one() {
        factors.push(RealExpr::Rat(c.clone()));
    }
    for (atom, &k) in m {
        factors.push(if k == 1 {
            atom.clone()
        } else {
            RealExpr::Pow(Box::new(atom.clone()), k)
        });
    }
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        RealExpr::Prod(factors)
    }
}

/// Numeric evaluation. Function variables (`Apply`) cannot be evaluated.
pub fn eval(e: &RealExpr, env: &HashMap<String, f64>, prims: &PrimTable) -> Result<f64, RealError> {
    let ev = |x: &RealExpr| eval(x, env, prims);
    Ok(match e {
        RealExpr::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
        RealExpr::Var(v) => *env.get(v).ok_or_else(|| RealError::UnboundVariable(v.clone()))?,
        RealExpr::Sum(xs) => xs.iter().map(ev).sum::<Result<f64, _>>()?,
        RealExpr::Prod(xs) => xs.iter().map(ev).product::<Result<f64, _>>()?,
        RealExpr::Neg(x) => -ev(x)?,
        RealExpr::Pow(x, k) => ev(x)?.powi(*k as i32),
        RealExpr::Sin(x) => ev(x)?.sin(),
        RealExpr::Cos(x) => ev(x)?.cos(),
        RealExpr::Exp(x) => ev(x)?.exp(),
        RealExpr::Prim(n, args) => {
            let sig = prims
                .get(n)
                .ok_or_else(|| RealError::UnsupportedPrimitive(n.clone()))?;
            let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
            (sig.eval)(&vals)
        }
        RealExpr::Apply { name, .. } => return Err(RealError::UnboundVariable(name.clone())),
    })
}

/// Fixed seed for the sampling fallback of [`expr_eq`].
pub const EQ_SAMPLE_SEED: u64 = 0x5eed_d1ff;
pub const EQ_SAMPLES: usize = 16;
pub const EQ_TOLERANCE: f64 = 1e-9;

/// Equality under the base-type interpretation.
///
/// Canonical forms decide the polynomial-over-atoms fragment. When a
/// transcendental function is involved, the two sides are also compared numerically at
/// [`EQ_SAMPLES`] points of `[-2, 2]^k`.
pub fn expr_eq(a: &RealExpr, b: &RealExpr, prims: &PrimTable) -> bool {
    let (ca, cb) = (a.canonical(), b.canonical());
    if ca == cb {
        return true;
    }
    if !(ca.has_transcendental() || cb.has_transcendental()) || ca.has_apply() || cb.has_apply() {
        return false;
    }
    let vars: Vec<String> = ca.free_vars().union(&cb.free_vars()).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(EQ_SAMPLE_SEED);
    for _ in 0..EQ_SAMPLES {
        let env: HashMap<String, f64> = vars
            .iter()
            .map(|v| (v.clone(), rng.gen_range(-2.0..=2.0)))
            .collect();
        match (eval(&ca, &env, prims), eval(&cb, &env, prims)) {
            (Ok(x), Ok(y)) => {
                if !x.is_finite() || !y.is_finite() || (x - y).abs() > EQ_TOLERANCE * x.abs().max(1.0) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Reads a canonical expression as a polynomial in `x`: returns `(a, b)` with
/// the expression equal to `a*x + b` and `a` rational, or `None`.
pub(crate) fn affine_in(e: &RealExpr, x: &str) -> Option<(BigRational, RealExpr)> {
    let p = to_poly(e);
    let xv = RealExpr::var(x);
    let mut a = BigRational::zero();
    let mut rest = Poly::new();
    for (m, c) in &p {
        if m.len() == 1 && m.get(&xv) == Some(&1) {
            a = c.clone();
        } else if m.keys().any(|atom| atom.mentions(x)) {
            return None;
        } else {
            rest.insert(m.clone(), c.clone());
        }
    }
    Some((a, from_poly(&rest)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> RealExpr {
        RealExpr::var("x")
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            RealExpr::add(RealExpr::int(3), x()).canonical(),
            RealExpr::Sum(vec![RealExpr::int(3), x()])
        );
        assert_eq!(
            RealExpr::add(x(), x()).canonical(),
            RealExpr::Prod(vec![RealExpr::int(2), x()])
        );
        let a = RealExpr::var("a");
        let b = RealExpr::var("b");
        assert_eq!(RealExpr::sub(RealExpr::add(a.clone(), b.clone()), b).canonical(), a);
        assert_eq!(RealExpr::Sin(Box::new(RealExpr::sub(x(), x()))).canonical(), RealExpr::zero());
        assert_eq!(RealExpr::Cos(Box::new(RealExpr::zero())).canonical(), RealExpr::one());
    }

    #[test]
    fn canonical_is_idempotent_on_mixed_expression() {
        let e = RealExpr::Prod(vec![
            RealExpr::add(x(), RealExpr::int(1)),
            RealExpr::Sin(Box::new(RealExpr::add(RealExpr::var("y"), x()))),
            RealExpr::pow(RealExpr::sub(x(), RealExpr::var("z")), 3),
        ]);
        let c = e.canonical();
        assert_eq!(c.canonical(), c);
    }

    #[test]
    fn expr_eq_examples() {
        let prims = PrimTable::standard();
        assert!(expr_eq(
            &RealExpr::add(x(), x()),
            &RealExpr::mul(RealExpr::int(2), x()),
            &prims
        ));
        assert!(!expr_eq(&x(), &RealExpr::add(x(), RealExpr::one()), &prims));
    }

    #[test]
    fn eval_examples() {
        let prims = PrimTable::standard();
        let env: HashMap<String, f64> = [("x".to_string(), 3.0)].into();
        let e = RealExpr::Sum(vec![RealExpr::Prod(vec![RealExpr::int(2), x()]), RealExpr::int(1)]);
        assert_eq!(eval(&e, &env, &prims).unwrap(), 7.0);
        let env0: HashMap<String, f64> = [("x".to_string(), 0.0)].into();
        assert_eq!(eval(&RealExpr::Sin(Box::new(x())), &env0, &prims).unwrap(), 0.0);
        let env15: HashMap<String, f64> = [("x".to_string(), 1.5)].into();
        assert_eq!(eval(&RealExpr::pow(x(), 2), &env15, &prims).unwrap(), 2.25);
        assert_eq!(
            eval(&RealExpr::var("q"), &env, &prims),
            Err(RealError::UnboundVariable("q".into()))
        );
    }

    #[test]
    fn affine_detection() {
        let e = RealExpr::Sum(vec![RealExpr::Prod(vec![RealExpr::int(3), x()]), RealExpr::var("y")]).canonical();
        let (a, b) = affine_in(&e, "x").unwrap();
        assert_eq!(a, BigRational::from_integer(3.into()));
        assert_eq!(b, RealExpr::var("y"));
        assert!(affine_in(&RealExpr::mul(x(), RealExpr::var("y")).canonical(), "x").is_none());
        assert!(affine_in(&RealExpr::pow(x(), 2).canonical(), "x").is_none());
    }
}
