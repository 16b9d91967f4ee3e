//! Terms, types and binding operations.
//!
//! Variables are named. Four constructs bind: `Lam`, `Der` (binds its variable in
//! the body only), `Int` (binds in the body only, the bounds are outside) and `Case`
//! (one binder per branch). Substitution renames binders on demand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

/// Name of the single base type instantiated by the shipped interpreter.
pub const REAL: &str = "R";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Base(String),
    Product(Vec<Type>),
    Arrow(Box<Type>, Box<Type>),
    Sum(Box<Type>, Box<Type>),
}

impl Type {
    pub fn real() -> Type {
        Type::Base(REAL.to_string())
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn sum(left: Type, right: Type) -> Type {
        Type::Sum(Box::new(left), Box::new(right))
    }

    pub fn product(items: Vec<Type>) -> Type {
        Type::Product(items)
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Type::Base(_))
    }

    /// Base types closed under arrows.
    pub fn is_interpretable(&self) -> bool {
        match self {
            Type::Base(_) => true,
            Type::Arrow(a, b) => a.is_interpretable() && b.is_interpretable(),
            _ => false,
        }
    }

    /// True when the type has no arrow and no sum anywhere, i.e. it can be a
    /// differentiation or integration variable.
    pub fn is_differentiable_domain(&self) -> bool {
        match self {
            Type::Base(_) => true,
            Type::Product(ts) => ts.iter().all(Type::is_differentiable_domain),
            _ => false,
        }
    }
}

/// The value of a constant: an exact numeral or a named primitive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Constant {
    Num(BigRational),
    Named(String),
}

impl Constant {
    pub fn int(n: i64) -> Constant {
        Constant::Num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Constant {
        Constant::Num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Constant::Num(r) if r.is_zero())
    }
}

/// Formats a rational as `n` or `n/d`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n`, `-n`, `n/d` or `-n/d`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    let unsigned = num.strip_prefix('-').unwrap_or(num);
    if !digits(unsigned) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = match den {
        Some(d) if digits(d) => d.parse().ok()?,
        Some(_) => return None,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Num(r) => f.write_str(&format_rational(r)),
            Constant::Named(n) => f.write_str(n),
        }
    }
}

impl From<Constant> for String {
    fn from(c: Constant) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Constant {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if let Some(r) = parse_rational(&s) {
            return Ok(Constant::Num(r));
        }
        if is_identifier(&s) {
            return Ok(Constant::Named(s));
        }
        Err(format!("invalid constant `{s}`"))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Const {
        value: Constant,
        ty: Type,
    },
    Var(String),
    Lam {
        var: String,
        ty: Type,
        body: Box<Term>,
    },
    App(Box<Term>, Box<Term>),
    Tuple(Vec<Term>),
    /// 1-based projection.
    Proj {
        index: usize,
        tuple: Box<Term>,
    },
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// Derivative of `body` with respect to `var`, taken at `at`.
    Der {
        body: Box<Term>,
        var: String,
        at: Box<Term>,
    },
    /// Integral of `body` over `var` from `lo` to `hi`.
    Int {
        lo: Box<Term>,
        hi: Box<Term>,
        body: Box<Term>,
        var: String,
    },
    /// Left injection; `ty` is the whole sum type.
    Inl {
        term: Box<Term>,
        ty: Type,
    },
    Inr {
        term: Box<Term>,
        ty: Type,
    },
    Case {
        scrutinee: Box<Term>,
        left_var: String,
        left: Box<Term>,
        right_var: String,
        right: Box<Term>,
    },
    Fix(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn num(n: i64) -> Term {
        Term::Const {
            value: Constant::int(n),
            ty: Type::real(),
        }
    }

    pub fn rational(r: BigRational) -> Term {
        Term::Const {
            value: Constant::Num(r),
            ty: Type::real(),
        }
    }

    pub fn ratio(n: i64, d: i64) -> Term {
        Term::Const {
            value: Constant::ratio(n, d),
            ty: Type::real(),
        }
    }

    pub fn named_const(name: impl Into<String>, ty: Type) -> Term {
        Term::Const {
            value: Constant::Named(name.into()),
            ty,
        }
    }

    pub fn lam(var: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Lam {
            var: var.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn tuple(items: Vec<Term>) -> Term {
        Term::Tuple(items)
    }

    pub fn proj(index: usize, tuple: Term) -> Term {
        Term::Proj {
            index,
            tuple: Box::new(tuple),
        }
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Term, r: Term) -> Term {
        Term::Mul(Box::new(l), Box::new(r))
    }

    pub fn der(body: Term, var: impl Into<String>, at: Term) -> Term {
        Term::Der {
            body: Box::new(body),
            var: var.into(),
            at: Box::new(at),
        }
    }

    pub fn int(lo: Term, hi: Term, body: Term, var: impl Into<String>) -> Term {
        Term::Int {
            lo: Box::new(lo),
            hi: Box::new(hi),
            body: Box::new(body),
            var: var.into(),
        }
    }

    pub fn inl(term: Term, ty: Type) -> Term {
        Term::Inl {
            term: Box::new(term),
            ty,
        }
    }

    pub fn inr(term: Term, ty: Type) -> Term {
        Term::Inr {
            term: Box::new(term),
            ty,
        }
    }

    pub fn case(
        scrutinee: Term,
        left_var: impl Into<String>,
        left: Term,
        right_var: impl Into<String>,
        right: Term,
    ) -> Term {
        Term::Case {
            scrutinee: Box::new(scrutinee),
            left_var: left_var.into(),
            left: Box::new(left),
            right_var: right_var.into(),
            right: Box::new(right),
        }
    }

    pub fn fix(t: Term) -> Term {
        Term::Fix(Box::new(t))
    }

    /// Left-nested `⊕` over a non-empty list.
    pub fn add_all(mut terms: Vec<Term>) -> Term {
        assert!(!terms.is_empty(), "add_all of empty list");
        let first = terms.remove(0);
        terms.into_iter().fold(first, Term::add)
    }

    /// Number of constructors in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms, indexed the way paths address them.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Const { .. } | Term::Var(_) => vec![],
            Term::Lam { body, .. } => vec![body],
            Term::App(f, a) => vec![f, a],
            Term::Tuple(items) => items.iter().collect(),
            Term::Proj { tuple, .. } => vec![tuple],
            Term::Add(l, r) | Term::Sub(l, r) | Term::Mul(l, r) => vec![l, r],
            Term::Der { body, at, .. } => vec![body, at],
            Term::Int { lo, hi, body, .. } => vec![lo, hi, body],
            Term::Inl { term, .. } | Term::Inr { term, .. } => vec![term],
            Term::Case {
                scrutinee,
                left,
                right,
                ..
            } => vec![scrutinee, left, right],
            Term::Fix(t) => vec![t],
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match (self, i) {
            (Term::Lam { body, .. }, 0) => Some(body),
            (Term::App(f, _), 0) => Some(f),
            (Term::App(_, a), 1) => Some(a),
            (Term::Tuple(items), i) => items.get_mut(i),
            (Term::Proj { tuple, .. }, 0) => Some(tuple),
            (Term::Add(l, _) | Term::Sub(l, _) | Term::Mul(l, _), 0) => Some(l),
            (Term::Add(_, r) | Term::Sub(_, r) | Term::Mul(_, r), 1) => Some(r),
            (Term::Der { body, .. }, 0) => Some(body),
            (Term::Der { at, .. }, 1) => Some(at),
            (Term::Int { lo, .. }, 0) => Some(lo),
            (Term::Int { hi, .. }, 1) => Some(hi),
            (Term::Int { body, .. }, 2) => Some(body),
            (Term::Inl { term, .. } | Term::Inr { term, .. }, 0) => Some(term),
            (Term::Case { scrutinee, .. }, 0) => Some(scrutinee),
            (Term::Case { left, .. }, 1) => Some(left),
            (Term::Case { right, .. }, 2) => Some(right),
            (Term::Fix(t), 0) => Some(t),
            _ => None,
        }
    }

    pub fn subterm_at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i)?.subterm_at(rest),
        }
    }

    /// Replaces the subterm at `path`, returning `None` when the path is invalid.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in path {
            cur = cur.child_mut(i)?;
        }
        *cur = new;
        Some(out)
    }
}

/// Renders a path as `0.1.2`, or `ε` for the root.
pub fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        "ε".to_string()
    } else {
        path.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Ordered variable bindings; lookups see the innermost binding.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypingContext {
    bindings: Vec<(String, Type)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, ty: Type) -> Self {
        self.push(name, ty);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Type) {
        self.bindings.push((name.into(), ty));
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn bindings(&self) -> &[(String, Type)] {
        &self.bindings
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.bindings.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl FromIterator<(String, Type)> for TypingContext {
    fn from_iter<I: IntoIterator<Item = (String, Type)>>(iter: I) -> Self {
        TypingContext {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Free variables of `t`.
pub fn free_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

/// Free variables paired with their type in `ctx`, when it is known.
pub fn free_vars_typed(t: &Term, ctx: &TypingContext) -> Vec<(String, Option<Type>)> {
    free_vars(t)
        .into_iter()
        .map(|n| {
            let ty = ctx.lookup(&n).cloned();
            (n, ty)
        })
        .collect()
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        Term::Const { .. } => {}
        Term::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Term::Lam { var, body, .. } => {
            bound.push(var);
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Der { body, var, at } => {
            collect_free(at, bound, out);
            bound.push(var);
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Int { lo, hi, body, var } => {
            collect_free(lo, bound, out);
            collect_free(hi, bound, out);
            bound.push(var);
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Case {
            scrutinee,
            left_var,
            left,
            right_var,
            right,
        } => {
            collect_free(scrutinee, bound, out);
            bound.push(left_var);
            collect_free(left, bound, out);
            bound.pop();
            bound.push(right_var);
            collect_free(right, bound, out);
            bound.pop();
        }
        other => {
            for c in other.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

/// Every variable name occurring in `t`, free or bound.
pub fn all_names(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_names(t, &mut out);
    out
}

fn collect_names(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Lam { var, .. } | Term::Der { var, .. } | Term::Int { var, .. } => {
            out.insert(var.clone());
        }
        Term::Case {
            left_var,
            right_var,
            ..
        } => {
            out.insert(left_var.clone());
            out.insert(right_var.clone());
        }
        _ => {}
    }
    for c in t.children() {
        collect_names(c, out);
    }
}

/// First of `base`, `base_1`, `base_2`, ... that is not in `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded search")
}

/// Strips a trailing `_<digits>` so that renaming `x_1` yields `x_2` rather than `x_1_1`.
pub(crate) fn name_stem(name: &str) -> &str {
    match name.rfind('_') {
        Some(i)
            if i > 0
                && i + 1 < name.len()
                && name[i + 1..].bytes().all(|b| b.is_ascii_digit()) =>
        {
            &name[..i]
        }
        _ => name,
    }
}

pub(crate) fn fresh_like(name: &str, avoid: &BTreeSet<String>) -> String {
    fresh_var(name_stem(name), avoid)
}

/// Capture-avoiding substitution `t[s/x]`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    let mut map = BTreeMap::new();
    map.insert(x.to_string(), s.clone());
    substitute_all(t, &map)
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute_all(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    let fv_range: BTreeSet<String> = map.values().flat_map(free_vars).collect();
    subst_rec(t, map, &fv_range)
}

fn subst_rec(t: &Term, map: &BTreeMap<String, Term>, fv_range: &BTreeSet<String>) -> Term {
    match t {
        Term::Const { .. } => t.clone(),
        Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Lam { var, ty, body } => {
            let (var, body) = subst_binder(var, body, map, fv_range);
            Term::Lam {
                var,
                ty: ty.clone(),
                body: Box::new(body),
            }
        }
        Term::Der { body, var, at } => {
            let at = subst_rec(at, map, fv_range);
            let (var, body) = subst_binder(var, body, map, fv_range);
            Term::Der {
                body: Box::new(body),
                var,
                at: Box::new(at),
            }
        }
        Term::Int { lo, hi, body, var } => {
            let lo = subst_rec(lo, map, fv_range);
            let hi = subst_rec(hi, map, fv_range);
            let (var, body) = subst_binder(var, body, map, fv_range);
            Term::Int {
                lo: Box::new(lo),
                hi: Box::new(hi),
                body: Box::new(body),
                var,
            }
        }
        Term::Case {
            scrutinee,
            left_var,
            left,
            right_var,
            right,
        } => {
            let scrutinee = subst_rec(scrutinee, map, fv_range);
            let (left_var, left) = subst_binder(left_var, left, map, fv_range);
            let (right_var, right) = subst_binder(right_var, right, map, fv_range);
            Term::Case {
                scrutinee: Box::new(scrutinee),
                left_var,
                left: Box::new(left),
                right_var,
                right: Box::new(right),
            }
        }
        Term::App(f, a) => Term::app(subst_rec(f, map, fv_range), subst_rec(a, map, fv_range)),
        Term::Tuple(items) => Term::Tuple(items.iter().map(|i| subst_rec(i, map, fv_range)).collect()),
        Term::Proj { index, tuple } => Term::proj(*index, subst_rec(tuple, map, fv_range)),
        Term::Add(l, r) => Term::add(subst_rec(l, map, fv_range), subst_rec(r, map, fv_range)),
        Term::Sub(l, r) => Term::sub(subst_rec(l, map, fv_range), subst_rec(r, map, fv_range)),
        Term::Mul(l, r) => Term::mul(subst_rec(l, map, fv_range), subst_rec(r, map, fv_range)),
        Term::Inl { term, ty } => Term::inl(subst_rec(term, map, fv_range), ty.clone()),
        Term::Inr { term, ty } => Term::inr(subst_rec(term, map, fv_range), ty.clone()),
        Term::Fix(f) => Term::fix(subst_rec(f, map, fv_range)),
    }
}

/// Pushes a substitution under one binder, renaming it if it would capture.
fn subst_binder(
    var: &str,
    body: &Term,
    map: &BTreeMap<String, Term>,
    fv_range: &BTreeSet<String>,
) -> (String, Term) {
    let shadowed = map.contains_key(var);
    let inner: BTreeMap<String, Term>;
    let map = if shadowed {
        inner = map
            .iter()
            .filter(|(k, _)| k.as_str() != var)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        &inner
    } else {
        map
    };
    if map.is_empty() {
        return (var.to_string(), body.clone());
    }
    let body_fv = free_vars(body);
    // Only entries that actually occur matter for capture.
    let relevant: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| body_fv.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if relevant.is_empty() {
        return (var.to_string(), body.clone());
    }
    let captures = relevant.values().any(|v| free_vars(v).contains(var));
    if captures {
        let mut avoid: BTreeSet<String> = body_fv;
        avoid.extend(fv_range.iter().cloned());
        avoid.extend(relevant.keys().cloned());
        let fresh = fresh_like(var, &avoid);
        let mut renamed = relevant;
        renamed.insert(var.to_string(), Term::Var(fresh.clone()));
        let range: BTreeSet<String> = renamed.values().flat_map(free_vars).collect();
        (fresh, subst_rec(body, &renamed, &range))
    } else {
        let range: BTreeSet<String> = relevant.values().flat_map(free_vars).collect();
        (var.to_string(), subst_rec(body, &relevant, &range))
    }
}

/// Renames the binder of a one-binder body to `new`, returning the new body.
pub fn rename_bound(var: &str, body: &Term, new: &str) -> Term {
    if var == new {
        body.clone()
    } else {
        substitute(body, var, &Term::Var(new.to_string()))
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    alpha_rec(t1, t2, &mut Vec::new(), &mut Vec::new())
}

fn bound_index(stack: &[&str], name: &str) -> Option<usize> {
    stack.iter().rposition(|n| *n == name)
}

fn alpha_rec<'a>(a: &'a Term, b: &'a Term, sa: &mut Vec<&'a str>, sb: &mut Vec<&'a str>) -> bool {
    fn under<'a>(
        va: &'a str,
        ba: &'a Term,
        vb: &'a str,
        bb: &'a Term,
        sa: &mut Vec<&'a str>,
        sb: &mut Vec<&'a str>,
    ) -> bool {
        sa.push(va);
        sb.push(vb);
        let r = alpha_rec(ba, bb, sa, sb);
        sa.pop();
        sb.pop();
        r
    }
    match (a, b) {
        (Term::Const { value: v1, ty: t1 }, Term::Const { value: v2, ty: t2 }) => v1 == v2 && t1 == t2,
        (Term::Var(x), Term::Var(y)) => match (bound_index(sa, x), bound_index(sb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (
            Term::Lam {
                var: v1,
                ty: t1,
                body: b1,
            },
            Term::Lam {
                var: v2,
                ty: t2,
                body: b2,
            },
        ) => t1 == t2 && under(v1, b1, v2, b2, sa, sb),
        (Term::App(f1, a1), Term::App(f2, a2))
        | (Term::Add(f1, a1), Term::Add(f2, a2))
        | (Term::Sub(f1, a1), Term::Sub(f2, a2))
        | (Term::Mul(f1, a1), Term::Mul(f2, a2)) => {
            alpha_rec(f1, f2, sa, sb) && alpha_rec(a1, a2, sa, sb)
        }
        (Term::Tuple(x), Term::Tuple(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| alpha_rec(p, q, sa, sb))
        }
        (
            Term::Proj {
                index: i1,
                tuple: t1,
            },
            Term::Proj {
                index: i2,
                tuple: t2,
            },
        ) => i1 == i2 && alpha_rec(t1, t2, sa, sb),
        (
            Term::Der {
                body: b1,
                var: v1,
                at: p1,
            },
            Term::Der {
                body: b2,
                var: v2,
                at: p2,
            },
        ) => alpha_rec(p1, p2, sa, sb) && under(v1, b1, v2, b2, sa, sb),
        (
            Term::Int {
                lo: l1,
                hi: h1,
                body: b1,
                var: v1,
            },
            Term::Int {
                lo: l2,
                hi: h2,
                body: b2,
                var: v2,
            },
        ) => {
            alpha_rec(l1, l2, sa, sb)
                && alpha_rec(h1, h2, sa, sb)
                && under(v1, b1, v2, b2, sa, sb)
        }
        (Term::Inl { term: x, ty: t1 }, Term::Inl { term: y, ty: t2 })
        | (Term::Inr { term: x, ty: t1 }, Term::Inr { term: y, ty: t2 }) => {
            t1 == t2 && alpha_rec(x, y, sa, sb)
        }
        (
            Term::Case {
                scrutinee: s1,
                left_var: lv1,
                left: l1,
                right_var: rv1,
                right: r1,
            },
            Term::Case {
                scrutinee: s2,
                left_var: lv2,
                left: l2,
                right_var: rv2,
                right: r2,
            },
        ) => {
            alpha_rec(s1, s2, sa, sb)
                && under(lv1, l1, lv2, l2, sa, sb)
                && under(rv1, r1, rv2, r2, sa, sb)
        }
        (Term::Fix(x), Term::Fix(y)) => alpha_rec(x, y, sa, sb),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> Type {
        Type::real()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_vars_respects_binders() {
        let t = Term::add(Term::var("x"), Term::var("y"));
        assert_eq!(free_vars(&t), set(&["x", "y"]));
        let lam = Term::lam("x", r(), t);
        assert_eq!(free_vars(&lam), set(&["y"]));
        let integral = Term::int(
            Term::var("a"),
            Term::var("b"),
            Term::der(Term::mul(Term::var("x"), Term::var("z")), "z", Term::var("z")),
            "z",
        );
        assert_eq!(free_vars(&integral), set(&["a", "b", "x"]));
    }

    #[test]
    fn der_point_is_outside_binder() {
        let t = Term::der(Term::var("x"), "x", Term::var("x"));
        assert_eq!(free_vars(&t), set(&["x"]));
        let t = Term::int(Term::var("x"), Term::num(1), Term::var("x"), "x");
        assert_eq!(free_vars(&t), set(&["x"]));
    }

    #[test]
    fn substitute_examples() {
        let t = Term::add(Term::var("x"), Term::var("y"));
        assert_eq!(
            substitute(&t, "x", &Term::num(3)),
            Term::add(Term::num(3), Term::var("y"))
        );
        let lam = Term::lam("y", r(), Term::var("x"));
        let out = substitute(&lam, "x", &Term::var("y"));
        match &out {
            Term::Lam { var, body, .. } => {
                assert_ne!(var, "y");
                assert_eq!(**body, Term::var("y"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(alpha_eq(&out, &Term::lam("y_1", r(), Term::var("y"))));
        let pair = Term::tuple(vec![Term::num(1), Term::num(2)]);
        assert_eq!(substitute(&Term::var("x"), "x", &pair), pair);
    }

    #[test]
    fn substitute_stops_at_shadowing_binder() {
        let t = Term::lam("x", r(), Term::var("x"));
        assert_eq!(substitute(&t, "x", &Term::num(1)), t);
        let d = Term::der(Term::var("x"), "x", Term::var("x"));
        assert_eq!(
            substitute(&d, "x", &Term::num(2)),
            Term::der(Term::var("x"), "x", Term::num(2))
        );
    }

    #[test]
    fn substitute_renames_der_and_int_binders() {
        let d = Term::der(Term::mul(Term::var("x"), Term::var("y")), "y", Term::num(0));
        let out = substitute(&d, "x", &Term::var("y"));
        let expected = Term::der(Term::mul(Term::var("y"), Term::var("w")), "w", Term::num(0));
        assert!(alpha_eq(&out, &expected), "{out:?}");
        let i = Term::int(Term::var("y"), Term::num(1), Term::add(Term::var("x"), Term::var("y")), "y");
        let out = substitute(&i, "x", &Term::var("y"));
        let expected = Term::int(
            Term::var("y"),
            Term::num(1),
            Term::add(Term::var("y"), Term::var("q")),
            "q",
        );
        assert!(alpha_eq(&out, &expected), "{out:?}");
    }

    #[test]
    fn simultaneous_substitution_does_not_chain() {
        let t = Term::add(Term::var("x"), Term::var("y"));
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), Term::var("y"));
        map.insert("y".to_string(), Term::var("x"));
        assert_eq!(
            substitute_all(&t, &map),
            Term::add(Term::var("y"), Term::var("x"))
        );
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(
            &Term::lam("x", r(), Term::var("x")),
            &Term::lam("y", r(), Term::var("y"))
        ));
        assert!(!alpha_eq(
            &Term::lam("x", r(), Term::var("x")),
            &Term::lam("x", r(), Term::num(0))
        ));
        let c = Term::num(5);
        assert!(alpha_eq(
            &Term::der(Term::var("x"), "x", c.clone()),
            &Term::der(Term::var("z"), "z", c)
        ));
        // a bound variable never matches a free one
        assert!(!alpha_eq(
            &Term::lam("x", r(), Term::var("y")),
            &Term::lam("y", r(), Term::var("y"))
        ));
    }

    #[test]
    fn fresh_var_scheme() {
        assert_eq!(fresh_var("x", &set(&[])), "x");
        assert_eq!(fresh_var("x", &set(&["x"])), "x_1");
        assert_eq!(fresh_var("x", &set(&["x", "x_1"])), "x_2");
        assert_eq!(fresh_like("x_1", &set(&["x", "x_1"])), "x_2");
    }

    #[test]
    fn context_lookup_is_innermost() {
        let ctx = TypingContext::new()
            .with("x", Type::real())
            .with("x", Type::product(vec![r(), r()]));
        assert_eq!(ctx.lookup("x"), Some(&Type::product(vec![r(), r()])));
        assert_eq!(ctx.lookup("y"), None);
    }

    #[test]
    fn paths_address_children() {
        let t = Term::der(Term::var("b"), "x", Term::tuple(vec![Term::num(1), Term::num(2)]));
        assert_eq!(t.subterm_at(&[1, 0]), Some(&Term::num(1)));
        let replaced = t.replace_at(&[1, 1], Term::num(7)).unwrap();
        assert_eq!(replaced.subterm_at(&[1, 1]), Some(&Term::num(7)));
        assert!(t.replace_at(&[3], Term::num(0)).is_none());
        assert_eq!(format_path(&[]), "ε");
        assert_eq!(format_path(&[1, 0]), "1.0");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3"), Some(BigRational::from_integer(3.into())));
        assert_eq!(
            parse_rational("-1/2"),
            Some(BigRational::new((-1).into(), 2.into()))
        );
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&BigRational::new(6.into(), 4.into())), "3/2");
    }
}
