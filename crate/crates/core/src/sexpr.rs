//! Canonical S-expression form of terms and types.
//!
//! One list form per constructor, single spaces, no trailing whitespace, so that
//! printing is injective and reading back is exact.

use std::fmt::Write;

use thiserror::Error;

use crate::syntax::{is_identifier, Constant, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("s-expression error: {0}")]
pub struct SexprError(pub String);

/// A parsed S-expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Sexpr {
        Sexpr::Atom(s.into())
    }

    pub fn list(items: Vec<Sexpr>) -> Sexpr {
        Sexpr::List(items)
    }

    pub fn write(&self, out: &mut String) {
        match self {
            Sexpr::Atom(a) => out.push_str(a),
            Sexpr::List(items) => {
                out.push('(');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    item.write(out);
                }
                out.push(')');
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    pub fn as_atom(&self) -> Result<&str, SexprError> {
        match self {
            Sexpr::Atom(a) => Ok(a),
            Sexpr::List(_) => Err(SexprError(format!("expected atom, found {}", self.render()))),
        }
    }
}

pub fn read(src: &str) -> Result<Sexpr, SexprError> {
    let mut stack: Vec<Vec<Sexpr>> = Vec::new();
    let mut result = None;
    let mut chars = src.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let item = match c {
            c if c.is_whitespace() => continue,
            '(' => {
                stack.push(Vec::new());
                continue;
            }
            ')' => {
                let items = stack
                    .pop()
                    .ok_or_else(|| SexprError(format!("unbalanced `)` at offset {i}")))?;
                Sexpr::List(items)
            }
            _ => {
                let mut end = i + c.len_utf8();
                while let Some(&(k, d)) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    end = k + d.len_utf8();
                    chars.next();
                }
                Sexpr::Atom(src[i..end].to_string())
            }
        };
        match stack.last_mut() {
            Some(top) => top.push(item),
            None if result.is_none() => result = Some(item),
            None => return Err(SexprError(format!("trailing input at offset {i}"))),
        }
    }
    if !stack.is_empty() {
        return Err(SexprError("unbalanced `(`".into()));
    }
    result.ok_or_else(|| SexprError("empty input".into()))
}

pub fn type_to_sexpr(ty: &Type) -> Sexpr {
    match ty {
        Type::Base(n) => Sexpr::atom(n.clone()),
        Type::Product(items) => {
            let mut v = vec![Sexpr::atom("prod")];
            v.extend(items.iter().map(type_to_sexpr));
            Sexpr::List(v)
        }
        Type::Arrow(a, b) => Sexpr::list(vec![Sexpr::atom("arrow"), type_to_sexpr(a), type_to_sexpr(b)]),
        Type::Sum(a, b) => Sexpr::list(vec![Sexpr::atom("sum"), type_to_sexpr(a), type_to_sexpr(b)]),
    }
}

pub fn term_to_sexpr(t: &Term) -> Sexpr {
    fn a(s: impl Into<String>) -> Sexpr {
        Sexpr::Atom(s.into())
    }
    let l = Sexpr::List;
    let s = term_to_sexpr;
    match t {
        Term::Const { value, ty } => l(vec![a("const"), a(value.to_string()), type_to_sexpr(ty)]),
        Term::Var(x) => a(x.clone()),
        Term::Lam { var, ty, body } => l(vec![a("lam"), a(var.clone()), type_to_sexpr(ty), s(body)]),
        Term::App(f, x) => l(vec![a("app"), s(f), s(x)]),
        Term::Tuple(items) => {
            let mut v = vec![a("tuple")];
            v.extend(items.iter().map(s));
            l(v)
        }
        Term::Proj { index, tuple } => l(vec![a("proj"), a(index.to_string()), s(tuple)]),
        Term::Add(x, y) => l(vec![a("add"), s(x), s(y)]),
        Term::Sub(x, y) => l(vec![a("sub"), s(x), s(y)]),
        Term::Mul(x, y) => l(vec![a("mul"), s(x), s(y)]),
        Term::Der { body, var, at } => l(vec![a("der"), s(body), a(var.clone()), s(at)]),
        Term::Int { lo, hi, body, var } => l(vec![a("int"), s(lo), s(hi), s(body), a(var.clone())]),
        Term::Inl { term, ty } => l(vec![a("inl"), s(term), type_to_sexpr(ty)]),
        Term::Inr { term, ty } => l(vec![a("inr"), s(term), type_to_sexpr(ty)]),
        Term::Case {
            scrutinee,
            left_var,
            left,
            right_var,
            right,
        } => l(vec![
            a("case"),
            s(scrutinee),
            a(left_var.clone()),
            s(left),
            a(right_var.clone()),
            s(right),
        ]),
        Term::Fix(f) => l(vec![a("fix"), s(f)]),
    }
}

pub fn print_term(t: &Term) -> String {
    term_to_sexpr(t).render()
}

pub fn print_type(ty: &Type) -> String {
    type_to_sexpr(ty).render()
}

fn name(e: &Sexpr) -> Result<String, SexprError> {
    let s = e.as_atom()?;
    if is_identifier(s) {
        Ok(s.to_string())
    } else {
        Err(SexprError(format!("invalid name `{s}`")))
    }
}

fn arity(items: &[Sexpr], n: usize) -> Result<(), SexprError> {
    if items.len() == n + 1 {
        Ok(())
    } else {
        let head = items.first().map(Sexpr::render).unwrap_or_default();
        Err(SexprError(format!(
            "`{head}` takes {n} arguments, found {}",
            items.len().saturating_sub(1)
        )))
    }
}

pub fn sexpr_to_type(e: &Sexpr) -> Result<Type, SexprError> {
    match e {
        Sexpr::Atom(_) => Ok(Type::Base(name(e)?)),
        Sexpr::List(items) => match items.first().map(Sexpr::as_atom).transpose()? {
            Some("prod") => {
                if items.len() < 3 {
                    return Err(SexprError("product type needs at least two components".into()));
                }
                Ok(Type::Product(items[1..].iter().map(sexpr_to_type).collect::<Result<_, _>>()?))
            }
            Some("arrow") => {
                arity(items, 2)?;
                Ok(Type::arrow(sexpr_to_type(&items[1])?, sexpr_to_type(&items[2])?))
            }
            Some("sum") => {
                arity(items, 2)?;
                Ok(Type::sum(sexpr_to_type(&items[1])?, sexpr_to_type(&items[2])?))
            }
            _ => Err(SexprError(format!("unknown type form {}", e.render()))),
        },
    }
}

pub fn sexpr_to_term(e: &Sexpr) -> Result<Term, SexprError> {
    let items = match e {
        Sexpr::Atom(_) => return Ok(Term::Var(name(e)?)),
        Sexpr::List(items) => items,
    };
    let t = sexpr_to_term;
    let head = items
        .first()
        .ok_or_else(|| SexprError("empty list".into()))?
        .as_atom()?;
    Ok(match head {
        "const" => {
            arity(items, 2)?;
            let value = Constant::try_from(items[1].as_atom()?.to_string()).map_err(SexprError)?;
            Term::Const {
                value,
                ty: sexpr_to_type(&items[2])?,
            }
        }
        "lam" => {
            arity(items, 3)?;
            Term::lam(name(&items[1])?, sexpr_to_type(&items[2])?, t(&items[3])?)
        }
        "app" => {
            arity(items, 2)?;
            Term::app(t(&items[1])?, t(&items[2])?)
        }
        "tuple" => {
            if items.len() < 3 {
                return Err(SexprError("tuple needs at least two components".into()));
            }
            Term::Tuple(items[1..].iter().map(t).collect::<Result<_, _>>()?)
        }
        "proj" => {
            arity(items, 2)?;
            let index = items[1]
                .as_atom()?
                .parse::<usize>()
                .map_err(|_| SexprError(format!("invalid projection index {}", items[1].render())))?;
            Term::proj(index, t(&items[2])?)
        }
        "add" | "sub" | "mul" => {
            arity(items, 2)?;
            let (x, y) = (t(&items[1])?, t(&items[2])?);
            match head {
                "add" => Term::add(x, y),
                "sub" => Term::sub(x, y),
                _ => Term::mul(x, y),
            }
        }
        "der" => {
            arity(items, 3)?;
            Term::der(t(&items[1])?, name(&items[2])?, t(&items[3])?)
        }
        "int" => {
            arity(items, 4)?;
            Term::int(t(&items[1])?, t(&items[2])?, t(&items[3])?, name(&items[4])?)
        }
        "inl" | "inr" => {
            arity(items, 2)?;
            let (x, ty) = (t(&items[1])?, sexpr_to_type(&items[2])?);
            if head == "inl" {
                Term::inl(x, ty)
            } else {
                Term::inr(x, ty)
            }
        }
        "case" => {
            arity(items, 5)?;
            Term::case(
                t(&items[1])?,
                name(&items[2])?,
                t(&items[3])?,
                name(&items[4])?,
                t(&items[5])?,
            )
        }
        "fix" => {
            arity(items, 1)?;
            Term::fix(t(&items[1])?)
        }
        other => return Err(SexprError(format!("unknown term form `{other}`"))),
    })
}

pub fn parse_term(src: &str) -> Result<Term, SexprError> {
    sexpr_to_term(&read(src)?)
}

pub fn parse_type(src: &str) -> Result<Type, SexprError> {
    sexpr_to_type(&read(src)?)
}

/// Writes `(name value)` pairs; a small helper for diagnostic dumps.
pub fn bindings_to_string(pairs: &[(String, Term)]) -> String {
    let mut out = String::from("(");
    for (i, (n, v)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({n} {})", print_term(v));
    }
    out.push(')');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_form() {
        let t = Term::lam(
            "x",
            Type::product(vec![Type::real(), Type::real()]),
            Term::proj(1, Term::var("x")),
        );
        let s = print_term(&t);
        assert_eq!(s, "(lam x (prod R R) (proj 1 x))");
        assert_eq!(parse_term(&s).unwrap(), t);
    }

    #[test]
    fn every_form_round_trips() {
        let r = Type::real();
        let sum = Type::sum(r.clone(), Type::arrow(r.clone(), r.clone()));
        let t = Term::case(
            Term::inl(Term::ratio(-1, 2), sum.clone()),
            "a",
            Term::int(
                Term::num(0),
                Term::var("a"),
                Term::der(Term::mul(Term::var("y"), Term::var("y")), "y", Term::var("x")),
                "x",
            ),
            "b",
            Term::fix(Term::app(
                Term::var("b"),
                Term::sub(Term::tuple(vec![Term::num(1), Term::num(2)]), Term::var("c")),
            )),
        );
        let s = print_term(&t);
        assert_eq!(parse_term(&s).unwrap(), t);
        let inr = Term::inr(Term::named_const("sin", Type::arrow(r.clone(), r)), sum);
        assert_eq!(
            print_term(&inr),
            "(inr (const sin (arrow R R)) (sum R (arrow R R)))"
        );
        assert_eq!(parse_term(&print_term(&inr)).unwrap(), inr);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_term("(lam x R)").is_err());
        assert!(parse_term("(tuple 1)").is_err());
        assert!(parse_term("(add x y) z").is_err());
        assert!(parse_term("(add x y").is_err());
        assert!(parse_type("(prod R)").is_err());
    }
}
