//! Term equality: normal forms compared under the base-type interpretation,
//! open terms compared by instantiating their free variables.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::embed::embed;
use crate::real::{expr_eq, PrimTable, RealError};
use crate::reduce::{normalize_with, Fuel, Options, ReduceError};
use crate::syntax::{all_names, alpha_eq, free_vars, fresh_var, substitute_all, Term, Type, TypingContext};
use crate::typeck::{typecheck_with, TypeError};

pub const DEFAULT_TRIALS: usize = 8;
pub const DEFAULT_SEED: u64 = 0xd1ff_ca1c;

#[derive(Clone, Debug)]
pub struct EqConfig {
    pub fuel: Fuel,
    pub trials: usize,
    pub seed: u64,
    pub prims: Arc<PrimTable>,
}

impl Default for EqConfig {
    fn default() -> Self {
        EqConfig {
            fuel: Fuel::default(),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            prims: Arc::new(PrimTable::standard()),
        }
    }
}

impl EqConfig {
    pub fn with_seed(seed: u64) -> Self {
        EqConfig {
            seed,
            ..EqConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EqError {
    /// Equality is undefined when a side has no normal form within the fuel.
    #[error("equality undefined: {0}")]
    Undefined(ReduceError),
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("terms have different types: {0} and {1}")]
    TypeMismatch(Type, Type),
    #[error("base interpretation failed: {0}")]
    Real(#[from] RealError),
}

impl From<ReduceError> for EqError {
    fn from(e: ReduceError) -> Self {
        EqError::Undefined(e)
    }
}

/// A substitution under which the two sides differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub substitution: Vec<(String, String)>,
    pub lhs_nf: String,
    pub rhs_nf: String,
    pub path: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqOutcome {
    pub equal: bool,
    pub trials: usize,
    pub witness: Option<Witness>,
}

/// Source of names that clash with nothing seen so far.
#[derive(Clone, Debug, Default)]
pub struct Names {
    taken: BTreeSet<String>,
}

impl Names {
    pub fn avoiding<'a>(terms: impl IntoIterator<Item = &'a Term>, ctx: &TypingContext) -> Self {
        let mut taken = ctx.names();
        for t in terms {
            taken.extend(all_names(t));
        }
        Names { taken }
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let n = fresh_var(base, &self.taken);
        self.taken.insert(n.clone());
        n
    }
}

/// Base-typed pieces of a value of type `ty`, obtained by projecting tuples and
/// applying functions to `arg` values. Sum-typed parts are skipped.
fn components(
    x: Term,
    ty: &Type,
    arg: &mut dyn FnMut(&Type) -> Term,
) -> Vec<(Term, Type)> {
    match ty {
        Type::Base(_) => vec![(x, ty.clone())],
        Type::Product(ts) => ts
            .iter()
            .enumerate()
            .flat_map(|(i, t)| components(Term::proj(i + 1, x.clone()), t, arg))
            .collect(),
        Type::Arrow(a, b) => {
            let v = arg(a);
            components(Term::app(x, v), b, arg)
        }
        Type::Sum(..) => vec![],
    }
}

/// A value of type `ty` built from fresh symbolic variables, used to apply
/// lambdas extensionally. Function parts become fresh interpretable function
/// variables applied to the base components of their argument.
pub fn generic_value(ty: &Type, names: &mut Names, ctx: &mut TypingContext) -> Term {
    generic_from(ty, &[], names, ctx)
}

fn generic_from(ty: &Type, inputs: &[(Term, Type)], names: &mut Names, ctx: &mut TypingContext) -> Term {
    match ty {
        Type::Base(_) => {
            let fty = inputs
                .iter()
                .rev()
                .fold(ty.clone(), |acc, (_, t)| Type::arrow(t.clone(), acc));
            let h = names.fresh(if inputs.is_empty() { "v" } else { "h" });
            ctx.push(h.clone(), fty);
            inputs.iter().fold(Term::var(h), |f, (a, _)| Term::app(f, a.clone()))
        }
        Type::Product(ts) => Term::Tuple(ts.iter().map(|t| generic_from(t, inputs, names, ctx)).collect()),
        Type::Sum(a, _) => Term::inl(generic_from(a, inputs, names, ctx), ty.clone()),
        Type::Arrow(a, b) => {
            let x = names.fresh("a");
            let mut ins = inputs.to_vec();
            ins.extend(
                components(Term::var(x.clone()), a, &mut |t| generic_value(t, names, ctx))
                    .into_iter()
                    .filter(|(_, t)| t.is_interpretable()),
            );
            Term::lam(x, (**a).clone(), generic_from(b, &ins, names, ctx))
        }
    }
}

/// Decides equality of two normal forms of type `ty`. Returns the path of the
/// first differing position, or `None` when they are equal.
pub fn nf_eq(
    ctx: &TypingContext,
    n1: &Term,
    n2: &Term,
    ty: &Type,
    cfg: &EqConfig,
) -> Result<Option<Vec<usize>>, EqError> {
    let mut ctx = ctx.clone();
    let mut names = Names::avoiding([n1, n2], &ctx);
    let mut path = Vec::new();
    let equal = nf_eq_rec(&mut ctx, &mut names, n1, n2, ty, cfg, &mut path)?;
    Ok(if equal { None } else { Some(path) })
}

fn normal(ctx: &TypingContext, t: &Term, cfg: &EqConfig) -> Result<Term, EqError> {
    let opts = Options {
        fuel: cfg.fuel,
        ..Options::default()
    };
    Ok(normalize_with(ctx, t, &opts)?.term)
}

fn nf_eq_rec(
    ctx: &mut TypingContext,
    names: &mut Names,
    n1: &Term,
    n2: &Term,
    ty: &Type,
    cfg: &EqConfig,
    path: &mut Vec<usize>,
) -> Result<bool, EqError> {
    if alpha_eq(n1, n2) {
        return Ok(true);
    }
    match ty {
        Type::Base(_) => Ok(expr_eq(&embed(n1, &cfg.prims)?, &embed(n2, &cfg.prims)?, &cfg.prims)),
        Type::Product(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let part = |n: &Term| match n {
                    Term::Tuple(items) if items.len() == ts.len() => Ok(items[i].clone()),
                    _ => normal(ctx, &Term::proj(i + 1, n.clone()), cfg),
                };
                let (a, b) = (part(n1)?, part(n2)?);
                path.push(i);
                if !nf_eq_rec(ctx, names, &a, &b, t, cfg, path)? {
                    return Ok(false);
                }
                path.pop();
            }
            Ok(true)
        }
        Type::Arrow(dom, cod) => {
            let arg = generic_value(dom, names, ctx);
            let a = normal(ctx, &Term::app(n1.clone(), arg.clone()), cfg)?;
            let b = normal(ctx, &Term::app(n2.clone(), arg), cfg)?;
            path.push(0);
            let r = nf_eq_rec(ctx, names, &a, &b, cod, cfg, path)?;
            if r {
                path.pop();
            }
            Ok(r)
        }
        Type::Sum(l, r) => match (n1, n2) {
            (Term::Inl { term: a, .. }, Term::Inl { term: b, .. }) => {
                path.push(0);
                let eq = nf_eq_rec(ctx, names, a, b, l, cfg, path)?;
                if eq {
                    path.pop();
                }
                Ok(eq)
            }
            (Term::Inr { term: a, .. }, Term::Inr { term: b, .. }) => {
                path.push(0);
                let eq = nf_eq_rec(ctx, names, a, b, r, cfg, path)?;
                if eq {
                    path.pop();
                }
                Ok(eq)
            }
            _ => Ok(false),
        },
    }
}

fn small_int(rng: &mut ChaCha8Rng) -> Term {
    Term::num(rng.gen_range(-3..=3))
}

/// A random polynomial of degree at most 2 in the given base terms.
fn random_poly(vars: &[Term], rng: &mut ChaCha8Rng) -> Term {
    let mut terms = vec![small_int(rng)];
    for (i, v) in vars.iter().enumerate() {
        if rng.gen_bool(0.7) {
            terms.push(Term::mul(small_int(rng), v.clone()));
        }
        for w in &vars[i..] {
            if rng.gen_bool(0.3) {
                terms.push(Term::mul(small_int(rng), Term::mul(v.clone(), w.clone())));
            }
        }
    }
    Term::add_all(terms)
}

/// A random closed or open value of type `ty` whose base parts are
/// polynomials in `inputs`.
fn random_value(ty: &Type, inputs: &[Term], trial: usize, names: &mut Names, rng: &mut ChaCha8Rng) -> Term {
    match ty {
        Type::Base(_) => random_poly(inputs, rng),
        Type::Product(ts) => Term::Tuple(ts.iter().map(|t| random_value(t, inputs, trial, names, rng)).collect()),
        Type::Sum(a, b) => {
            if trial.is_multiple_of(2) {
                Term::inl(random_value(a, inputs, trial, names, rng), ty.clone())
            } else {
                Term::inr(random_value(b, inputs, trial, names, rng), ty.clone())
            }
        }
        Type::Arrow(a, b) => {
            let x = names.fresh("a");
            let mut ins = inputs.to_vec();
            let comps = components(Term::var(x.clone()), a, &mut |t| random_value(t, &[], trial, &mut Names::default(), rng));
            ins.extend(comps.into_iter().map(|(c, _)| c));
            Term::lam(x, (**a).clone(), random_value(b, &ins, trial, names, rng))
        }
    }
}

/// The instantiation of a free variable of type `ty` for one trial: base
/// parts stay symbolic, functions and injections are sampled.
fn instantiate(
    name: &str,
    ty: &Type,
    trial: usize,
    names: &mut Names,
    ctx: &mut TypingContext,
    rng: &mut ChaCha8Rng,
) -> Term {
    match ty {
        Type::Base(_) => {
            let v = names.fresh(name);
            ctx.push(v.clone(), ty.clone());
            Term::var(v)
        }
        Type::Product(ts) => Term::Tuple(
            ts.iter()
                .map(|t| instantiate(name, t, trial, names, ctx, rng))
                .collect(),
        ),
        Type::Sum(a, b) => {
            if trial.is_multiple_of(2) {
                Term::inl(instantiate(name, a, trial, names, ctx, rng), ty.clone())
            } else {
                Term::inr(instantiate(name, b, trial, names, ctx, rng), ty.clone())
            }
        }
        Type::Arrow(..) => random_value(ty, &[], trial, names, rng),
    }
}

fn needs_sampling(ty: &Type) -> bool {
    match ty {
        Type::Base(_) => false,
        Type::Product(ts) => ts.iter().any(needs_sampling),
        Type::Arrow(..) | Type::Sum(..) => true,
    }
}

/// Equality of two open terms of the same type under `ctx`.
///
/// Free base variables stay symbolic, tuple variables are split into base
/// variables, and function or sum variables are sampled over `cfg.trials`
/// trials. `equal: true` means no trial found a difference.
pub fn term_eq(ctx: &TypingContext, t1: &Term, t2: &Term, cfg: &EqConfig) -> Result<EqOutcome, EqError> {
    let ty1 = typecheck_with(ctx, t1, &cfg.prims)?;
    let ty2 = typecheck_with(ctx, t2, &cfg.prims)?;
    if ty1 != ty2 {
        return Err(EqError::TypeMismatch(ty1, ty2));
    }
    let mut fv = free_vars(t1);
    fv.extend(free_vars(t2));
    let free: Vec<(String, Type)> = fv
        .iter()
        .filter_map(|x| ctx.lookup(x).map(|t| (x.clone(), t.clone())))
        .collect();
    let symbolic_only = free.iter().all(|(_, t)| t.is_base());
    let trials = if free.iter().any(|(_, t)| needs_sampling(t)) {
        cfg.trials.max(1)
    } else {
        1
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for trial in 0..trials {
        let mut tctx = ctx.clone();
        let mut map = BTreeMap::new();
        if !symbolic_only {
            let mut names = Names::avoiding([t1, t2], ctx);
            for (x, ty) in &free {
                if !ty.is_base() {
                    map.insert(x.clone(), instantiate(x, ty, trial, &mut names, &mut tctx, &mut rng));
                }
            }
        }
        let s1 = substitute_all(t1, &map);
        let s2 = substitute_all(t2, &map);
        let n1 = normal(&tctx, &s1, cfg)?;
        let n2 = normal(&tctx, &s2, cfg)?;
        if let Some(path) = nf_eq(&tctx, &n1, &n2, &ty1, cfg)? {
            return Ok(EqOutcome {
                equal: false,
                trials: trial + 1,
                witness: Some(Witness {
                    substitution: map.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                    lhs_nf: n1.to_string(),
                    rhs_nf: n2.to_string(),
                    path,
                }),
            });
        }
    }
    Ok(EqOutcome {
        equal: true,
        trials,
        witness: None,
    })
}

/// Shorthand for closed or symbolic comparisons in tests and reports.
pub fn terms_equal(ctx: &TypingContext, t1: &Term, t2: &Term) -> Result<bool, EqError> {
    Ok(term_eq(ctx, t1, t2, &EqConfig::default())?.equal)
}
