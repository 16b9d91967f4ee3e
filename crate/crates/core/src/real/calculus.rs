use num::{BigRational, One, Zero};

use super::prims::{PrimTable, PrimitiveSignature};
use super::{affine_in, from_poly, to_poly, Monomial, Poly, RealError, RealExpr};

/// Symbolic derivative of `e` with respect to `x`, canonicalized.
pub fn sym_diff(e: &RealExpr, x: &str, prims: &PrimTable) -> Result<RealExpr, RealError> {
    Ok(diff(e, x, prims)?.canonical())
}

fn diff(e: &RealExpr, x: &str, prims: &PrimTable) -> Result<RealExpr, RealError> {
    if !e.mentions(x) {
        return Ok(RealExpr::zero());
    }
    Ok(match e {
        RealExpr::Rat(_) => RealExpr::zero(),
        RealExpr::Var(v) => {
            if v == x {
                RealExpr::one()
            } else {
                RealExpr::zero()
            }
        }
        RealExpr::Sum(xs) => RealExpr::Sum(xs.iter().map(|t| diff(t, x, prims)).collect::<Result<_, _>>()?),
        RealExpr::Neg(t) => RealExpr::Neg(Box::new(diff(t, x, prims)?)),
        RealExpr::Prod(xs) => {
            let mut terms = Vec::new();
            for i in 0..xs.len() {
                let d = diff(&xs[i], x, prims)?;
                if d.is_zero() {
                    continue;
                }
                let mut factors = xs.clone();
                factors[i] = d;
                terms.push(RealExpr::Prod(factors));
            }
            RealExpr::Sum(terms)
        }
        RealExpr::Pow(b, k) => RealExpr::Prod(vec![
            RealExpr::int(*k as i64),
            RealExpr::pow((**b).clone(), k - 1),
            diff(b, x, prims)?,
        ]),
        RealExpr::Sin(u) => RealExpr::mul(RealExpr::Cos(u.clone()), diff(u, x, prims)?),
        RealExpr::Cos(u) => RealExpr::Neg(Box::new(RealExpr::mul(RealExpr::Sin(u.clone()), diff(u, x, prims)?))),
        RealExpr::Exp(u) => RealExpr::mul(e.clone(), diff(u, x, prims)?),
        RealExpr::Prim(name, args) => {
            let sig = prims
                .get(name)
                .ok_or_else(|| RealError::UnsupportedPrimitive(name.clone()))?;
            let mut terms = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let da = diff(a, x, prims)?;
                if da.is_zero() {
                    continue;
                }
                let rule = sig
                    .derivatives
                    .get(i)
                    .ok_or_else(|| RealError::UnsupportedPrimitive(name.clone()))?;
                terms.push(RealExpr::mul(PrimitiveSignature::instantiate(rule, args), da));
            }
            RealExpr::Sum(terms)
        }
        RealExpr::Apply {
            name,
            partials,
            args,
        } => {
            let mut terms = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let da = diff(a, x, prims)?;
                if da.is_zero() {
                    continue;
                }
                let mut p = partials.clone();
                p.push(i);
                p.sort_unstable();
                terms.push(RealExpr::mul(
                    RealExpr::Apply {
                        name: name.clone(),
                        partials: p,
                        args: args.clone(),
                    },
                    da,
                ));
            }
            RealExpr::Sum(terms)
        }
    })
}

/// Definite integral `F(hi) - F(lo)` for an antiderivative `F` in `x`.
pub fn sym_integrate(
    e: &RealExpr,
    x: &str,
    lo: &RealExpr,
    hi: &RealExpr,
    prims: &PrimTable,
) -> Result<RealExpr, RealError> {
    let f = antiderivative(e, x, prims)?;
    Ok(RealExpr::sub(f.subst1(x, hi), f.subst1(x, lo)).canonical())
}

/// A symbolic antiderivative of `e` in `x`, for polynomials in `x` times at most
/// one transcendental factor of an affine argument.
pub fn antiderivative(e: &RealExpr, x: &str, prims: &PrimTable) -> Result<RealExpr, RealError> {
    let mut acc = Poly::new();
    for (m, c) in to_poly(e) {
        let term = integrate_monomial(&m, x, prims).ok_or_else(|| RealError::IntegrationUnsupported {
            expr: super::print_infix(&from_poly(&std::iter::once((m.clone(), c.clone())).collect())),
            var: x.to_string(),
        })?;
        for (tm, tc) in to_poly(&term) {
            let entry = acc.entry(tm.clone()).or_insert_with(BigRational::zero);
            *entry += tc * &c;
            if entry.is_zero() {
                acc.remove(&tm);
            }
        }
    }
    Ok(from_poly(&acc))
}

fn integrate_monomial(m: &Monomial, x: &str, prims: &PrimTable) -> Option<RealExpr> {
    let xv = RealExpr::var(x);
    let mut power = 0u32;
    let mut constant: Vec<RealExpr> = Vec::new();
    let mut special: Option<RealExpr> = None;
    for (atom, &k) in m {
        if *atom == xv {
            power = k;
        } else if !atom.mentions(x) {
            constant.push(RealExpr::pow(atom.clone(), k));
        } else if k == 1 && special.is_none() {
            special = Some(atom.clone());
        } else {
            return None;
        }
    }
    let body = match special {
        None => RealExpr::mul(
            RealExpr::Rat(BigRational::new(1.into(), (power + 1).into())),
            RealExpr::pow(xv, power + 1),
        ),
        Some(atom) => integrate_special(&atom, power, x, prims)?,
    };
    constant.push(body);
    Some(RealExpr::Prod(constant))
}

/// `∫ x^k * atom dx` where `atom` depends on `x`.
fn integrate_special(atom: &RealExpr, k: u32, x: &str, prims: &PrimTable) -> Option<RealExpr> {
    let xv = RealExpr::var(x);
    let inv = |a: &BigRational| RealExpr::Rat(BigRational::one() / a);
    match atom {
        RealExpr::Sin(u) | RealExpr::Cos(u) | RealExpr::Exp(u) => {
            let (a, _) = affine_in(u, x)?;
            if a.is_zero() {
                return None;
            }
            // integration by parts: ∫ x^k g = x^k G/a - (k/a) ∫ x^(k-1) G
            let (g_anti, sign): (RealExpr, i64) = match atom {
                RealExpr::Sin(_) => (RealExpr::Cos(u.clone()), -1),
                RealExpr::Cos(_) => (RealExpr::Sin(u.clone()), 1),
                _ => (RealExpr::Exp(u.clone()), 1),
            };
            let lead = RealExpr::Prod(vec![
                RealExpr::int(sign),
                inv(&a),
                RealExpr::pow(xv, k),
                g_anti.clone(),
            ]);
            if k == 0 {
                return Some(lead);
            }
            let rest = integrate_special(&g_anti, k - 1, x, prims)?;
            Some(RealExpr::sub(
                lead,
                RealExpr::Prod(vec![
                    RealExpr::int(sign),
                    RealExpr::Rat(BigRational::from_integer(k.into()) / &a),
                    rest,
                ]),
            ))
        }
        RealExpr::Prim(name, args) if k == 0 && args.len() == 1 => {
            let (a, _) = affine_in(&args[0], x)?;
            if a.is_zero() {
                return None;
            }
            let rule = prims.get(name)?.antiderivative.as_ref()?;
            Some(RealExpr::mul(inv(&a), PrimitiveSignature::instantiate(rule, args)))
        }
        RealExpr::Apply {
            name,
            partials,
            args,
        } if k == 0 => {
            // ∫ ∂_i f(.., a*x + b, ..) dx = f(..)/a when only argument i varies
            let varying: Vec<usize> = (0..args.len()).filter(|&i| args[i].mentions(x)).collect();
            let [i] = varying[..] else { return None };
            let (a, _) = affine_in(&args[i], x)?;
            let pos = partials.iter().position(|&p| p == i)?;
            if a.is_zero() {
                return None;
            }
            let mut rest = partials.clone();
            rest.remove(pos);
            Some(RealExpr::mul(
                inv(&a),
                RealExpr::Apply {
                    name: name.clone(),
                    partials: rest,
                    args: args.clone(),
                },
            ))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn x() -> RealExpr {
        RealExpr::var("x")
    }

    fn rat(n: i64, d: i64) -> RealExpr {
        RealExpr::Rat(BigRational::new(n.into(), d.into()))
    }

    fn prims() -> PrimTable {
        PrimTable::standard()
    }

    #[test]
    fn diff_examples() {
        let p = prims();
        assert_eq!(
            sym_diff(&RealExpr::pow(x(), 2), "x", &p).unwrap(),
            RealExpr::Prod(vec![RealExpr::int(2), x()])
        );
        assert_eq!(
            sym_diff(&RealExpr::Sin(Box::new(x())), "x", &p).unwrap(),
            RealExpr::Cos(Box::new(x()))
        );
        assert_eq!(sym_diff(&RealExpr::var("c"), "x", &p).unwrap(), RealExpr::zero());
    }

    #[test]
    fn integrate_examples() {
        let p = prims();
        let z = RealExpr::zero();
        assert_eq!(sym_integrate(&RealExpr::one(), "x", &z, &RealExpr::int(2), &p).unwrap(), RealExpr::int(2));
        assert_eq!(
            sym_integrate(&RealExpr::int(2), "x", &z, &RealExpr::int(3), &p).unwrap(),
            RealExpr::int(6)
        );
        assert_eq!(sym_integrate(&x(), "x", &z, &RealExpr::one(), &p).unwrap(), rat(1, 2));
    }

    #[test]
    fn integration_by_parts_matches_derivative() {
        let p = prims();
        let u = RealExpr::add(RealExpr::mul(RealExpr::int(2), x()), RealExpr::var("b"));
        for atom in [
            RealExpr::Sin(Box::new(u.clone())),
            RealExpr::Cos(Box::new(u.clone())),
            RealExpr::Exp(Box::new(u.clone())),
        ] {
            let e = RealExpr::mul(RealExpr::pow(x(), 2), atom);
            let f = antiderivative(&e, "x", &p).unwrap();
            assert_eq!(sym_diff(&f, "x", &p).unwrap(), e.canonical(), "{}", print_e(&f));
        }
    }

    fn print_e(e: &RealExpr) -> String {
        super::super::print_infix(e)
    }

    #[test]
    fn unsupported_integrands() {
        let p = prims();
        let sx = RealExpr::Sin(Box::new(x()));
        let e = RealExpr::mul(sx.clone(), RealExpr::Cos(Box::new(x())));
        assert!(matches!(
            antiderivative(&e, "x", &p),
            Err(RealError::IntegrationUnsupported { .. })
        ));
        let e = RealExpr::Sin(Box::new(RealExpr::pow(x(), 2)));
        assert!(antiderivative(&e, "x", &p).is_err());
    }

    #[test]
    fn unknown_function_integrates_its_derivative() {
        let p = prims();
        let d = RealExpr::Apply {
            name: "f".into(),
            partials: vec![0],
            args: vec![x()],
        };
        let out = sym_integrate(&d, "x", &RealExpr::var("a"), &RealExpr::var("b"), &p).unwrap();
        let f = |arg: &str| RealExpr::Apply {
            name: "f".into(),
            partials: vec![],
            args: vec![RealExpr::var(arg)],
        };
        assert_eq!(out, RealExpr::sub(f("b"), f("a")).canonical());
    }

    #[test]
    fn registered_primitive_rules() {
        let mut p = prims();
        let h = RealExpr::var("#0");
        p.register(PrimitiveSignature {
            name: "cube".into(),
            arity: 1,
            derivatives: vec![RealExpr::mul(RealExpr::int(3), RealExpr::pow(h.clone(), 2))],
            antiderivative: Some(RealExpr::mul(rat(1, 4), RealExpr::pow(h, 4))),
            eval: |a| a[0].powi(3),
        });
        let e = RealExpr::Prim("cube".into(), vec![RealExpr::mul(RealExpr::int(2), x())]);
        assert_eq!(
            sym_diff(&e, "x", &p).unwrap(),
            RealExpr::Prod(vec![RealExpr::int(24), RealExpr::pow(x(), 2)])
        );
        let f = antiderivative(&e, "x", &p).unwrap();
        assert!(super::super::expr_eq(&sym_diff(&f, "x", &p).unwrap(), &e, &p));
        let missing = RealExpr::Prim("nope".into(), vec![x()]);
        assert_eq!(
            sym_diff(&missing, "x", &p),
            Err(RealError::UnsupportedPrimitive("nope".into()))
        );
        let env: HashMap<String, f64> = [("x".to_string(), 0.5)].into();
        assert_eq!(super::super::eval(&e, &env, &p).unwrap(), 1.0);
    }
}
