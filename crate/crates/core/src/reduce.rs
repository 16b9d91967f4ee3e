//! Small-step reduction with a leftmost-outermost full-reduction strategy.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::{all_names, format_path, free_vars, fresh_like, rename_bound, substitute, Term, Type, TypingContext};
use crate::text::{print_term, Style};
use crate::typeck::type_of;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    Beta,
    Proj,
    CaseInl,
    CaseInr,
    FixUnfold,
    EAppDer1,
    EAppDer2,
    EAppDer3,
    EAppDer4,
    EAppInt1,
    EAppInt2,
    EAppInt3,
    EAppInt4,
    EAppAdd1,
    EAppAdd2,
    EAppSub1,
    EAppSub2,
    EAppMul1,
    EAppMul2,
    EAppMul3,
    EAppMul4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One contraction: the redex at `path` and what replaced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: Rule,
    pub path: Vec<usize>,
    pub before: Term,
    pub after: Term,
}

impl Step {
    pub fn apply(&self, t: &Term) -> Option<Term> {
        if t.subterm_at(&self.path)? != &self.before {
            return None;
        }
        t.replace_at(&self.path, self.after.clone())
    }

    pub fn render(&self, n: usize, style: Style) -> String {
        format!(
            "#{n} {} @ {}: {} ⟶ {}",
            self.rule,
            format_path(&self.path),
            print_term(&self.before, style),
            print_term(&self.after, style)
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
}

impl ReductionTrace {
    /// Applies every step in order, failing if one does not match.
    pub fn replay(&self, start: &Term) -> Option<Term> {
        self.steps.iter().try_fold(start.clone(), |t, s| s.apply(&t))
    }

    /// Every intermediate term, starting with `start`.
    pub fn terms(&self, start: &Term) -> Vec<Term> {
        let mut out = vec![start.clone()];
        for s in &self.steps {
            let next = s.apply(out.last().expect("non-empty")).expect("trace replays");
            out.push(next);
        }
        out
    }

    pub fn render(&self, style: Style) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| s.render(i + 1, style) + "\n")
            .collect()
    }
}

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub remaining: u64,
}

impl Fuel {
    pub fn new(remaining: u64) -> Self {
        Fuel { remaining }
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(DEFAULT_FUEL)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted {
        steps: u64,
        last: Box<Term>,
        trace: ReductionTrace,
    },
    #[error("stuck term (no rule applies, not a normal form): {}", print_term(.0, Style::ASCII))]
    StuckTerm(Box<Term>),
    #[error("cannot determine the type of {}", print_term(.0, Style::ASCII))]
    IllTyped(Box<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    /// Contracts a uniformly chosen redex at every step.
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub term: Term,
    pub steps: u64,
    pub trace: Option<ReductionTrace>,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub fuel: Fuel,
    pub strategy: Strategy,
    pub trace: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            fuel: Fuel::default(),
            strategy: Strategy::LeftmostOutermost,
            trace: false,
        }
    }
}

/// Redex positions in strategy order, with the rule each would fire.
/// With `first_only` the search stops at the leftmost-outermost one.
pub fn redexes(ctx: &TypingContext, t: &Term, first_only: bool) -> Result<Vec<(Vec<usize>, Rule)>, ReduceError> {
    let mut out = Vec::new();
    let mut ctx = ctx.clone();
    Finder {
        first_only,
        out: &mut out,
    }
    .visit(&mut ctx, t, &mut Vec::new())?;
    Ok(out)
}

/// The next step under the default strategy, `None` at a normal form.
pub fn step(ctx: &TypingContext, t: &Term) -> Result<Option<Step>, ReduceError> {
    match redexes(ctx, t, true)?.into_iter().next() {
        Some((path, rule)) => Ok(Some(contract_at(t, path, rule))),
        None if is_nf_shape(&mut ctx.clone(), t) => Ok(None),
        None => Err(ReduceError::StuckTerm(Box::new(t.clone()))),
    }
}

fn contract_at(t: &Term, path: Vec<usize>, rule: Rule) -> Step {
    let before = t.subterm_at(&path).expect("redex path").clone();
    let after = contract(&before, rule);
    Step {
        rule,
        path,
        before,
        after,
    }
}

pub fn normalize(ctx: &TypingContext, t: &Term, fuel: Fuel) -> Result<Term, ReduceError> {
    normalize_with(
        ctx,
        t,
        &Options {
            fuel,
            ..Options::default()
        },
    )
    .map(|n| n.term)
}

pub fn normalize_with(ctx: &TypingContext, t: &Term, opts: &Options) -> Result<Normalized, ReduceError> {
    let mut rng = match opts.strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::LeftmostOutermost => None,
    };
    let mut cur = t.clone();
    let mut trace = ReductionTrace::default();
    let mut steps = 0u64;
    loop {
        let (path, rule) = match &mut rng {
            None => match redexes(ctx, &cur, true)?.into_iter().next() {
                Some(r) => r,
                None => break,
            },
            Some(rng) => {
                let mut all = redexes(ctx, &cur, false)?;
                if all.is_empty() {
                    break;
                }
                let i = rng.gen_range(0..all.len());
                all.swap_remove(i)
            }
        };
        if steps >= opts.fuel.remaining {
            return Err(ReduceError::FuelExhausted {
                steps,
                last: Box::new(cur),
                trace,
            });
        }
        let s = contract_at(&cur, path, rule);
        cur = cur.replace_at(&s.path, s.after.clone()).expect("redex path");
        steps += 1;
        if opts.trace {
            trace.steps.push(s);
        }
    }
    if !is_nf_shape(&mut ctx.clone(), &cur) {
        return Err(ReduceError::StuckTerm(Box::new(cur)));
    }
    Ok(Normalized {
        term: cur,
        steps,
        trace: opts.trace.then_some(trace),
    })
}

/// Membership in the normal-form grammar: no redex anywhere, and outside
/// lambda bodies the shape is a tuple, an injection or an interpretable `nb`.
pub fn is_normal_form(ctx: &TypingContext, t: &Term) -> bool {
    matches!(redexes(ctx, t, true), Ok(r) if r.is_empty()) && is_nf_shape(&mut ctx.clone(), t)
}

/// The interpretable-term grammar: `nb`, or a lambda over an interpretable
/// type whose body is again interpretable.
pub fn is_interpretable_nf(ctx: &TypingContext, t: &Term) -> bool {
    fn go(ctx: &mut TypingContext, t: &Term) -> bool {
        match t {
            Term::Lam { var, ty, body } if ty.is_interpretable() => {
                ctx.push(var, ty.clone());
                let ok = go(ctx, body);
                ctx.pop();
                ok
            }
            _ => is_nb(ctx, t),
        }
    }
    go(&mut ctx.clone(), t)
}

fn is_nf_shape(ctx: &mut TypingContext, t: &Term) -> bool {
    match t {
        Term::Tuple(items) => items.iter().all(|i| is_nf_shape(ctx, i)),
        Term::Lam { .. } => true,
        Term::Inl { term, .. } | Term::Inr { term, .. } => is_nf_shape(ctx, term),
        _ => is_nb(ctx, t),
    }
}

fn is_nb(ctx: &mut TypingContext, t: &Term) -> bool {
    match t {
        Term::Const { .. } => true,
        Term::Var(x) => ctx.lookup(x).is_some_and(Type::is_interpretable),
        Term::App(f, a) => is_nb(ctx, f) && is_nf_shape(ctx, a),
        Term::Add(l, r) | Term::Sub(l, r) => {
            (is_nb(ctx, l) && is_nf_shape(ctx, r)) || (is_nf_shape(ctx, l) && is_nb(ctx, r))
        }
        Term::Mul(l, r) => is_nb(ctx, l) && is_nb(ctx, r),
        Term::Der { body, var, at } => {
            is_nb(ctx, at) && {
                let Some(ty) = type_of(ctx, at) else { return false };
                ctx.push(var, ty);
                let ok = is_nb(ctx, body);
                ctx.pop();
                ok
            }
        }
        Term::Int { lo, hi, body, var } => {
            is_nb(ctx, lo) && is_nb(ctx, hi) && {
                let Some(ty) = type_of(ctx, lo) else { return false };
                ctx.push(var, ty);
                let ok = is_nb(ctx, body);
                ctx.pop();
                ok
            }
        }
        _ => false,
    }
}

struct Finder<'a> {
    first_only: bool,
    out: &'a mut Vec<(Vec<usize>, Rule)>,
}

fn is_base(ctx: &mut TypingContext, t: &Term) -> Result<bool, ReduceError> {
    type_of(ctx, t)
        .map(|ty| ty.is_base())
        .ok_or_else(|| ReduceError::IllTyped(Box::new(t.clone())))
}

fn tuples_of_len(a: &Term, b: &Term) -> bool {
    matches!((a, b), (Term::Tuple(x), Term::Tuple(y)) if x.len() == y.len())
}

/// The rule that fires at the root of `t`, if any.
fn root_rule(ctx: &mut TypingContext, t: &Term) -> Result<Option<Rule>, ReduceError> {
    use Rule::*;
    Ok(match t {
        Term::App(f, _) if matches!(**f, Term::Lam { .. }) => Some(Beta),
        Term::Proj { index, tuple } => match &**tuple {
            Term::Tuple(items) if (1..=items.len()).contains(index) => Some(Proj),
            _ => None,
        },
        Term::Case { scrutinee, .. } => match **scrutinee {
            Term::Inl { .. } => Some(CaseInl),
            Term::Inr { .. } => Some(CaseInr),
            _ => None,
        },
        Term::Fix(_) => Some(FixUnfold),
        Term::Der { body, at, .. } => {
            if matches!(**at, Term::Tuple(_)) {
                Some(EAppDer4)
            } else {
                let rule = match **body {
                    Term::Tuple(_) => Some(EAppDer1),
                    Term::Inl { .. } | Term::Inr { .. } => Some(EAppDer2),
                    Term::Lam { .. } => Some(EAppDer3),
                    _ => None,
                };
                match rule {
                    Some(r) if is_base(ctx, at)? => Some(r),
                    _ => None,
                }
            }
        }
        Term::Int { lo, hi, body, .. } => {
            if tuples_of_len(lo, hi) {
                Some(EAppInt4)
            } else {
                let rule = match **body {
                    Term::Tuple(_) => Some(EAppInt1),
                    Term::Inl { .. } | Term::Inr { .. } => Some(EAppInt2),
                    Term::Lam { .. } => Some(EAppInt3),
                    _ => None,
                };
                match rule {
                    Some(r) if is_base(ctx, lo)? && is_base(ctx, hi)? => Some(r),
                    _ => None,
                }
            }
        }
        Term::Add(l, r) | Term::Sub(l, r) => {
            let add = matches!(t, Term::Add(..));
            if tuples_of_len(l, r) {
                Some(if add { EAppAdd1 } else { EAppSub1 })
            } else if matches!((&**l, &**r), (Term::Lam { .. }, Term::Lam { .. })) {
                Some(if add { EAppAdd2 } else { EAppSub2 })
            } else {
                None
            }
        }
        Term::Mul(l, r) => {
            if tuples_of_len(l, r) {
                Some(EAppMul4)
            } else {
                let rule = match **l {
                    Term::Tuple(_) => Some(EAppMul1),
                    Term::Lam { .. } => Some(EAppMul2),
                    Term::Inl { .. } | Term::Inr { .. } => Some(EAppMul3),
                    _ => None,
                };
                match rule {
                    Some(rule) if is_base(ctx, r)? => Some(rule),
                    _ => None,
                }
            }
        }
        _ => None,
    })
}

impl Finder<'_> {
    fn done(&self) -> bool {
        self.first_only && !self.out.is_empty()
    }

    fn child(
        &mut self,
        ctx: &mut TypingContext,
        t: &Term,
        path: &mut Vec<usize>,
        i: usize,
        bind: Option<(&str, Type)>,
    ) -> Result<(), ReduceError> {
        if self.done() {
            return Ok(());
        }
        path.push(i);
        let bound = bind.is_some();
        if let Some((x, ty)) = bind {
            ctx.push(x, ty);
        }
        let r = self.visit(ctx, t, path);
        if bound {
            ctx.pop();
        }
        path.pop();
        r
    }

    fn visit(&mut self, ctx: &mut TypingContext, t: &Term, path: &mut Vec<usize>) -> Result<(), ReduceError> {
        if let Some(rule) = root_rule(ctx, t)? {
            self.out.push((path.clone(), rule));
            if self.first_only {
                return Ok(());
            }
        }
        let ty_of = |ctx: &mut TypingContext, s: &Term| {
            type_of(ctx, s).ok_or_else(|| ReduceError::IllTyped(Box::new(s.clone())))
        };
        match t {
            Term::Const { .. } | Term::Var(_) => Ok(()),
            Term::Lam { var, ty, body } => self.child(ctx, body, path, 0, Some((var, ty.clone()))),
            Term::Der { body, var, at } => {
                self.child(ctx, at, path, 1, None)?;
                if self.done() {
                    return Ok(());
                }
                let ty = ty_of(ctx, at)?;
                self.child(ctx, body, path, 0, Some((var, ty)))
            }
            Term::Int { lo, hi, body, var } => {
                self.child(ctx, lo, path, 0, None)?;
                self.child(ctx, hi, path, 1, None)?;
                if self.done() {
                    return Ok(());
                }
                let ty = ty_of(ctx, lo)?;
                self.child(ctx, body, path, 2, Some((var, ty)))
            }
            Term::Case {
                scrutinee,
                left_var,
                left,
                right_var,
                right,
            } => {
                self.child(ctx, scrutinee, path, 0, None)?;
                if self.done() {
                    return Ok(());
                }
                let Type::Sum(a, b) = ty_of(ctx, scrutinee)? else {
                    return Err(ReduceError::IllTyped(Box::new(t.clone())));
                };
                self.child(ctx, left, path, 1, Some((left_var, *a)))?;
                self.child(ctx, right, path, 2, Some((right_var, *b)))
            }
            _ => {
                for (i, c) in t.children().into_iter().enumerate() {
                    self.child(ctx, c, path, i, None)?;
                }
                Ok(())
            }
        }
    }
}

/// A name for a new binder that clashes with nothing in `avoid`.
fn fresh_from(base: &str, avoid: &mut BTreeSet<String>) -> String {
    let mut taken = avoid.clone();
    taken.insert(base.to_string());
    let n = fresh_like(base, &taken);
    avoid.insert(n.clone());
    n
}

/// Renames the binder `var` of `body` when it is in `avoid`.
fn unclash(var: &str, body: &Term, avoid: &BTreeSet<String>) -> (String, Term) {
    if !avoid.contains(var) {
        return (var.to_string(), body.clone());
    }
    let mut taken = avoid.clone();
    taken.extend(all_names(body));
    let n = fresh_like(var, &taken);
    let b = rename_bound(var, body, &n);
    (n, b)
}

fn boxed(t: &Term) -> Box<Term> {
    Box::new(t.clone())
}

/// Contracts a redex at the root of `t` with `rule`.
///
/// Panics if `rule` does not match the shape of `t`.
pub fn contract(t: &Term, rule: Rule) -> Term {
    use Rule::*;
    match (rule, t) {
        (Beta, Term::App(f, a)) => match &**f {
            Term::Lam { var, body, .. } => substitute(body, var, a),
            _ => unreachable!(),
        },
        (Proj, Term::Proj { index, tuple }) => match &**tuple {
            Term::Tuple(items) => items[index - 1].clone(),
            _ => unreachable!(),
        },
        (CaseInl | CaseInr, Term::Case {
            scrutinee,
            left_var,
            left,
            right_var,
            right,
        }) => match &**scrutinee {
            Term::Inl { term, .. } => substitute(left, left_var, term),
            Term::Inr { term, .. } => substitute(right, right_var, term),
            _ => unreachable!(),
        },
        (FixUnfold, Term::Fix(f)) => Term::App(f.clone(), boxed(t)),
        (EAppDer1 | EAppDer2 | EAppDer3, Term::Der { body, var, at }) => {
            let der = |b: &Term| Term::Der {
                body: boxed(b),
                var: var.clone(),
                at: at.clone(),
            };
            match &**body {
                Term::Tuple(items) => Term::Tuple(items.iter().map(der).collect()),
                Term::Inl { term, ty } => Term::inl(der(term), ty.clone()),
                Term::Inr { term, ty } => Term::inr(der(term), ty.clone()),
                Term::Lam { var: y, ty, body: b } => {
                    let mut avoid = free_vars(at);
                    avoid.insert(var.clone());
                    let (y, b) = unclash(y, b, &avoid);
                    Term::lam(y, ty.clone(), der(&b))
                }
                _ => unreachable!(),
            }
        }
        (EAppDer4, Term::Der { body, var, at }) => {
            let Term::Tuple(points) = &**at else { unreachable!() };
            let mut avoid = all_names(body);
            avoid.extend(points.iter().flat_map(free_vars));
            avoid.insert(var.clone());
            let comps = (0..points.len())
                .map(|i| {
                    let xi = fresh_from(var, &mut avoid);
                    let mut star = points.clone();
                    star[i] = Term::Var(xi.clone());
                    Term::der(substitute(body, var, &Term::Tuple(star)), xi, points[i].clone())
                })
                .collect();
            Term::Tuple(comps)
        }
        (EAppInt1 | EAppInt2 | EAppInt3, Term::Int { lo, hi, body, var }) => {
            let int = |b: &Term| Term::Int {
                lo: lo.clone(),
                hi: hi.clone(),
                body: boxed(b),
                var: var.clone(),
            };
            match &**body {
                Term::Tuple(items) => Term::Tuple(items.iter().map(int).collect()),
                Term::Inl { term, ty } => Term::inl(int(term), ty.clone()),
                Term::Inr { term, ty } => Term::inr(int(term), ty.clone()),
                Term::Lam { var: y, ty, body: b } => {
                    let mut avoid = free_vars(lo);
                    avoid.extend(free_vars(hi));
                    avoid.insert(var.clone());
                    let (y, b) = unclash(y, b, &avoid);
                    Term::lam(y, ty.clone(), int(&b))
                }
                _ => unreachable!(),
            }
        }
        (EAppInt4, Term::Int { lo, hi, body, var }) => {
            let (Term::Tuple(los), Term::Tuple(his)) = (&**lo, &**hi) else { unreachable!() };
            let mut avoid = all_names(body);
            avoid.extend(los.iter().chain(his).flat_map(free_vars));
            avoid.insert(var.clone());
            let n = los.len();
            let parts = (0..n)
                .map(|i| {
                    let xi = fresh_from(var, &mut avoid);
                    let star: Vec<Term> = (0..n)
                        .map(|j| match j.cmp(&i) {
                            std::cmp::Ordering::Less => his[j].clone(),
                            std::cmp::Ordering::Equal => Term::Var(xi.clone()),
                            std::cmp::Ordering::Greater => los[j].clone(),
                        })
                        .collect();
                    let b = Term::proj(i + 1, substitute(body, var, &Term::Tuple(star)));
                    Term::int(los[i].clone(), his[i].clone(), b, xi)
                })
                .collect();
            Term::add_all(parts)
        }
        (EAppAdd1 | EAppSub1, Term::Add(l, r) | Term::Sub(l, r)) => {
            let (Term::Tuple(a), Term::Tuple(b)) = (&**l, &**r) else { unreachable!() };
            let op: fn(Term, Term) -> Term = if rule == EAppAdd1 { Term::add } else { Term::sub };
            Term::Tuple(a.iter().zip(b).map(|(x, y)| op(x.clone(), y.clone())).collect())
        }
        (EAppAdd2 | EAppSub2, Term::Add(l, r) | Term::Sub(l, r)) => {
            let (
                Term::Lam { var: x, ty, body: b1 },
                Term::Lam { var: y, body: b2, .. },
            ) = (&**l, &**r)
            else {
                unreachable!()
            };
            let op: fn(Term, Term) -> Term = if rule == EAppAdd2 { Term::add } else { Term::sub };
            let fv2 = free_vars(r);
            let z = if !fv2.contains(x) {
                x.clone()
            } else {
                let mut avoid = all_names(l);
                avoid.extend(all_names(r));
                fresh_from(x, &mut avoid)
            };
            Term::lam(z.clone(), ty.clone(), op(rename_bound(x, b1, &z), rename_bound(y, b2, &z)))
        }
        (EAppMul1, Term::Mul(l, r)) => {
            let Term::Tuple(items) = &**l else { unreachable!() };
            Term::Tuple(items.iter().map(|i| Term::mul(i.clone(), (**r).clone())).collect())
        }
        (EAppMul2, Term::Mul(l, r)) => {
            let Term::Lam { var, ty, body } = &**l else { unreachable!() };
            let (y, b) = unclash(var, body, &free_vars(r));
            Term::lam(y, ty.clone(), Term::mul(b, (**r).clone()))
        }
        (EAppMul3, Term::Mul(l, r)) => match &**l {
            Term::Inl { term, ty } => Term::inl(Term::mul((**term).clone(), (**r).clone()), ty.clone()),
            Term::Inr { term, ty } => Term::inr(Term::mul((**term).clone(), (**r).clone()), ty.clone()),
            _ => unreachable!(),
        },
        (EAppMul4, Term::Mul(l, r)) => {
            let (Term::Tuple(a), Term::Tuple(b)) = (&**l, &**r) else { unreachable!() };
            Term::add_all(a.iter().zip(b).map(|(x, y)| Term::mul(x.clone(), y.clone())).collect())
        }
        _ => panic!("rule {rule} does not apply to {}", print_term(t, Style::ASCII)),
    }
}
