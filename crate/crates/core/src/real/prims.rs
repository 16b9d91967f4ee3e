use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::OnceLock;

use num::BigRational;

use super::RealExpr;
use crate::syntax::Type;

/// A primitive function on the base type.
///
/// Rules are templates over the placeholders `#0`, `#1`, ... standing for the
/// arguments. `derivatives[i]` is the partial derivative in argument `i`;
/// `antiderivative` is only meaningful for unary primitives.
#[derive(Clone, Debug)]
pub struct PrimitiveSignature {
    pub name: String,
    pub arity: usize,
    pub derivatives: Vec<RealExpr>,
    pub antiderivative: Option<RealExpr>,
    pub eval: fn(&[f64]) -> f64,
}

pub fn placeholder(i: usize) -> String {
    format!("#{i}")
}

impl PrimitiveSignature {
    /// The curried type `R -> ... -> R`.
    pub fn ty(&self) -> Type {
        (0..self.arity).fold(Type::real(), |acc, _| Type::arrow(Type::real(), acc))
    }

    pub fn instantiate(template: &RealExpr, args: &[RealExpr]) -> RealExpr {
        let map: HashMap<String, RealExpr> = args
            .iter()
            .enumerate()
            .map(|(i, a)| (placeholder(i), a.clone()))
            .collect();
        template.subst(&map)
    }
}

#[derive(Clone, Debug, Default)]
pub struct PrimTable {
    sigs: BTreeMap<String, PrimitiveSignature>,
}

impl PrimTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `sin`, `cos` and `exp`.
    pub fn standard() -> Self {
        let arg = || Box::new(RealExpr::var(placeholder(0)));
        let mut t = Self::empty();
        t.register(PrimitiveSignature {
            name: "sin".into(),
            arity: 1,
            derivatives: vec![RealExpr::Cos(arg())],
            antiderivative: Some(RealExpr::Neg(Box::new(RealExpr::Cos(arg())))),
            eval: |a| a[0].sin(),
        });
        t.register(PrimitiveSignature {
            name: "cos".into(),
            arity: 1,
            derivatives: vec![RealExpr::Neg(Box::new(RealExpr::Sin(arg())))],
            antiderivative: Some(RealExpr::Sin(arg())),
            eval: |a| a[0].cos(),
        });
        t.register(PrimitiveSignature {
            name: "exp".into(),
            arity: 1,
            derivatives: vec![RealExpr::Exp(arg())],
            antiderivative: Some(RealExpr::Exp(arg())),
            eval: |a| a[0].exp(),
        });
        t
    }

    /// A process-wide copy of [`PrimTable::standard`].
    pub fn shared() -> &'static PrimTable {
        static TABLE: OnceLock<PrimTable> = OnceLock::new();
        TABLE.get_or_init(PrimTable::standard)
    }

    pub fn register(&mut self, sig: PrimitiveSignature) {
        assert_eq!(sig.derivatives.len(), sig.arity, "one derivative rule per argument");
        self.sigs.insert(sig.name.clone(), sig);
    }

    pub fn get(&self, name: &str) -> Option<&PrimitiveSignature> {
        self.sigs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sigs.keys().map(String::as_str)
    }

    /// Builds the expression for `name` applied to `args`, mapping the
    /// built-in transcendental functions to their dedicated nodes.
    pub fn apply(&self, name: &str, args: Vec<RealExpr>) -> RealExpr {
        match (name, args.len()) {
            ("sin", 1) => RealExpr::Sin(Box::new(args.into_iter().next().expect("one arg"))),
            ("cos", 1) => RealExpr::Cos(Box::new(args.into_iter().next().expect("one arg"))),
            ("exp", 1) => RealExpr::Exp(Box::new(args.into_iter().next().expect("one arg"))),
            _ => RealExpr::Prim(name.to_string(), args),
        }
    }
}

/// `1/n!` as an exact rational.
pub fn inverse_factorial(n: u32) -> BigRational {
    let f = (1..=n).fold(num::BigInt::from(1), |acc, k| acc * k);
    BigRational::new(1.into(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_table_types() {
        let t = PrimTable::standard();
        assert_eq!(t.get("sin").unwrap().ty(), Type::arrow(Type::real(), Type::real()));
        assert!(t.get("tan").is_none());
        assert_eq!(t.names().collect::<Vec<_>>(), vec!["cos", "exp", "sin"]);
    }

    #[test]
    fn factorials() {
        assert_eq!(inverse_factorial(0), BigRational::from_integer(1.into()));
        assert_eq!(inverse_factorial(3), BigRational::new(1.into(), 6.into()));
    }
}
