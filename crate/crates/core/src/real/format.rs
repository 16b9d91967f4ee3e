//! Infix and S-expression renderings of [`RealExpr`], with readers for both.
//!
//! Infix: `a + b`, `-a`, `a*b`, `a^k`, `sin(a)`, `f(a, b)` for an unknown
//! function, `f[0,1](a, b)` for its partial derivatives, `$name(a)` for a
//! registered primitive. Sums and products print with at least two operands.

use num::BigRational;

use super::RealExpr;
use crate::sexpr::{read, Sexpr};
use crate::syntax::{format_rational, parse_rational};

pub fn print_infix(e: &RealExpr) -> String {
    let mut s = String::new();
    write_infix(&mut s, e, 0);
    s
}

// 0: sum, 1: leading factor, 2: factor, 3: power base
fn write_infix(out: &mut String, e: &RealExpr, level: u8) {
    let own = match e {
        RealExpr::Sum(_) => 0,
        RealExpr::Prod(_) | RealExpr::Neg(_) => 1,
        RealExpr::Pow(..) => 2,
        _ => 3,
    };
    let paren = own < level;
    if paren {
        out.push('(');
    }
    match e {
        RealExpr::Rat(r) => out.push_str(&format_rational(r)),
        RealExpr::Var(v) => out.push_str(v),
        RealExpr::Sum(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_infix(out, x, 1);
            }
        }
        RealExpr::Neg(x) => {
            out.push('-');
            if let RealExpr::Rat(r) = &**x {
                // `-1` would read back as a literal
                out.push('(');
                out.push_str(&format_rational(r));
                out.push(')');
            } else {
                write_infix(out, x, 2);
            }
        }
        RealExpr::Prod(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                write_infix(out, x, if i == 0 { 1 } else { 2 });
            }
        }
        RealExpr::Pow(b, k) => {
            write_infix(out, b, 3);
            out.push('^');
            out.push_str(&k.to_string());
        }
        RealExpr::Sin(x) | RealExpr::Cos(x) | RealExpr::Exp(x) => {
            out.push_str(match e {
                RealExpr::Sin(_) => "sin",
                RealExpr::Cos(_) => "cos",
                _ => "exp",
            });
            write_args(out, std::slice::from_ref(&**x));
        }
        RealExpr::Prim(n, args) => {
            out.push('$');
            out.push_str(n);
            write_args(out, args);
        }
        RealExpr::Apply {
            name,
            partials,
            args,
        } => {
            out.push_str(name);
            if !partials.is_empty() {
                out.push('[');
                let ps: Vec<String> = partials.iter().map(|p| p.to_string()).collect();
                out.push_str(&ps.join(","));
                out.push(']');
            }
            write_args(out, args);
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_args(out: &mut String, args: &[RealExpr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_infix(out, a, 0);
    }
    out.push(')');
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Name(String),
    Prim(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let is_name = |c: u8| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' || c == b'#' || c == b'%';
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'-' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            i += 1;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < b.len() && b[i] == b'/' && b[i + 1].is_ascii_digit() {
                i += 1;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text = &src[start..i];
            out.push(Tok::Num(parse_rational(text).ok_or_else(|| format!("bad number `{text}`"))?));
        } else if c == b'$' || is_name(c) {
            let start = i;
            i += 1;
            while i < b.len() && is_name(b[i]) {
                i += 1;
            }
            let text = &src[start..i];
            out.push(match text.strip_prefix('$') {
                Some(n) => Tok::Prim(n.to_string()),
                None => Tok::Name(text.to_string()),
            });
        } else if b"+-*^()[],".contains(&c) {
            out.push(Tok::Sym(c as char));
            i += 1;
        } else {
            return Err(format!("unexpected character at offset {i}"));
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<Tok>,
    pos: usize,
}

impl Reader {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}` at token {}", self.pos))
        }
    }

    fn sum(&mut self) -> Result<RealExpr, String> {
        let first = self.product()?;
        if self.peek() != Some(&Tok::Sym('+')) {
            return Ok(first);
        }
        let mut xs = vec![first];
        while self.eat('+') {
            xs.push(self.product()?);
        }
        Ok(RealExpr::Sum(xs))
    }

    fn product(&mut self) -> Result<RealExpr, String> {
        let first = self.unary()?;
        if self.peek() != Some(&Tok::Sym('*')) {
            return Ok(first);
        }
        let mut xs = vec![first];
        while self.eat('*') {
            xs.push(self.unary()?);
        }
        Ok(RealExpr::Prod(xs))
    }

    fn unary(&mut self) -> Result<RealExpr, String> {
        if self.eat('-') {
            return Ok(RealExpr::Neg(Box::new(self.power()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RealExpr, String> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(k)) if k.is_integer() => {
                    self.pos += 1;
                    let k: u32 = k.to_integer().try_into().map_err(|_| "bad exponent".to_string())?;
                    return Ok(RealExpr::Pow(Box::new(base), k));
                }
                _ => return Err("expected exponent".into()),
            }
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<RealExpr>, String> {
        self.expect('(')?;
        let mut xs = vec![self.sum()?];
        while self.eat(',') {
            xs.push(self.sum()?);
        }
        self.expect(')')?;
        Ok(xs)
    }

    fn atom(&mut self) -> Result<RealExpr, String> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(RealExpr::Rat(r))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Prim(n)) => {
                self.pos += 1;
                Ok(RealExpr::Prim(n, self.args()?))
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                let mut partials = Vec::new();
                let has_partials = self.eat('[');
                if has_partials {
                    loop {
                        match self.peek().cloned() {
                            Some(Tok::Num(k)) if k.is_integer() => {
                                self.pos += 1;
                                partials.push(k.to_integer().try_into().map_err(|_| "bad index".to_string())?);
                            }
                            _ => return Err("expected partial index".into()),
                        }
                        if !self.eat(',') {
                            break;
                        }
                    }
                    self.expect(']')?;
                }
                if self.peek() != Some(&Tok::Sym('(')) {
                    if has_partials {
                        return Err("expected arguments".into());
                    }
                    return Ok(RealExpr::Var(n));
                }
                let args = self.args()?;
                Ok(match (n.as_str(), args.len(), has_partials) {
                    ("sin", 1, false) => RealExpr::Sin(Box::new(args.into_iter().next().expect("arg"))),
                    ("cos", 1, false) => RealExpr::Cos(Box::new(args.into_iter().next().expect("arg"))),
                    ("exp", 1, false) => RealExpr::Exp(Box::new(args.into_iter().next().expect("arg"))),
                    _ => RealExpr::Apply {
                        name: n,
                        partials,
                        args,
                    },
                })
            }
            other => Err(format!("unexpected {other:?}")),
        }
    }
}

pub fn parse_infix(src: &str) -> Result<RealExpr, String> {
    let mut r = Reader {
        toks: lex(src)?,
        pos: 0,
    };
    let e = r.sum()?;
    if r.pos != r.toks.len() {
        return Err(format!("trailing input at token {}", r.pos));
    }
    Ok(e)
}

pub fn to_sexpr(e: &RealExpr) -> Sexpr {
    fn a(s: impl Into<String>) -> Sexpr {
        Sexpr::Atom(s.into())
    }
    let s = to_sexpr;
    let tagged = |tag: &str, xs: &[RealExpr]| {
        let mut v = vec![a(tag)];
        v.extend(xs.iter().map(s));
        Sexpr::List(v)
    };
    match e {
        RealExpr::Rat(r) => a(format_rational(r)),
        RealExpr::Var(v) => a(v.clone()),
        RealExpr::Sum(xs) => tagged("sum", xs),
        RealExpr::Prod(xs) => tagged("prod", xs),
        RealExpr::Neg(x) => Sexpr::List(vec![a("neg"), s(x)]),
        RealExpr::Pow(x, k) => Sexpr::List(vec![a("pow"), s(x), a(k.to_string())]),
        RealExpr::Sin(x) => Sexpr::List(vec![a("sin"), s(x)]),
        RealExpr::Cos(x) => Sexpr::List(vec![a("cos"), s(x)]),
        RealExpr::Exp(x) => Sexpr::List(vec![a("exp"), s(x)]),
        RealExpr::Prim(n, args) => {
            let mut v = vec![a("prim"), a(n.clone())];
            v.extend(args.iter().map(s));
            Sexpr::List(v)
        }
        RealExpr::Apply {
            name,
            partials,
            args,
        } => {
            let mut v = vec![
                a("apply"),
                a(name.clone()),
                Sexpr::List(partials.iter().map(|p| a(p.to_string())).collect()),
            ];
            v.extend(args.iter().map(s));
            Sexpr::List(v)
        }
    }
}

pub fn print_sexpr(e: &RealExpr) -> String {
    to_sexpr(e).render()
}

fn from_sexpr(e: &Sexpr) -> Result<RealExpr, String> {
    let items = match e {
        Sexpr::Atom(x) => {
            return Ok(match parse_rational(x) {
                Some(r) => RealExpr::Rat(r),
                None => RealExpr::Var(x.clone()),
            })
        }
        Sexpr::List(items) => items,
    };
    let head = items
        .first()
        .ok_or("empty list")?
        .as_atom()
        .map_err(|e| e.to_string())?;
    let rest = || items[1..].iter().map(from_sexpr).collect::<Result<Vec<_>, _>>();
    let one = || -> Result<Box<RealExpr>, String> {
        match &items[1..] {
            [x] => Ok(Box::new(from_sexpr(x)?)),
            _ => Err(format!("`{head}` takes one argument")),
        }
    };
    let index = |x: &Sexpr| -> Result<usize, String> {
        x.as_atom()
            .map_err(|e| e.to_string())?
            .parse()
            .map_err(|_| "bad index".to_string())
    };
    Ok(match head {
        "sum" => RealExpr::Sum(rest()?),
        "prod" => RealExpr::Prod(rest()?),
        "neg" => RealExpr::Neg(one()?),
        "sin" => RealExpr::Sin(one()?),
        "cos" => RealExpr::Cos(one()?),
        "exp" => RealExpr::Exp(one()?),
        "pow" if items.len() == 3 => {
            let k = index(&items[2])?;
            RealExpr::Pow(Box::new(from_sexpr(&items[1])?), k.try_into().map_err(|_| "bad exponent")?)
        }
        "prim" if items.len() >= 2 => RealExpr::Prim(
            items[1].as_atom().map_err(|e| e.to_string())?.to_string(),
            items[2..].iter().map(from_sexpr).collect::<Result<_, _>>()?,
        ),
        "apply" if items.len() >= 3 => {
            let partials = match &items[2] {
                Sexpr::List(ps) => ps.iter().map(index).collect::<Result<Vec<_>, _>>()?,
                _ => return Err("expected partials list".into()),
            };
            RealExpr::Apply {
                name: items[1].as_atom().map_err(|e| e.to_string())?.to_string(),
                partials,
                args: items[3..].iter().map(from_sexpr).collect::<Result<_, _>>()?,
            }
        }
        other => return Err(format!("unknown form `{other}`")),
    })
}

pub fn parse_sexpr(src: &str) -> Result<RealExpr, String> {
    from_sexpr(&read(src).map_err(|e| e.to_string())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<RealExpr> {
        let x = || RealExpr::var("x");
        vec![
            RealExpr::Sum(vec![RealExpr::int(3), x()]),
            RealExpr::Prod(vec![RealExpr::int(-2), x(), RealExpr::pow(RealExpr::var("y"), 3)]),
            RealExpr::Sum(vec![
                RealExpr::Rat(BigRational::new(1.into(), 2.into())),
                RealExpr::Neg(Box::new(RealExpr::int(1))),
                RealExpr::Neg(Box::new(RealExpr::Sum(vec![x(), RealExpr::int(1)]))),
            ]),
            RealExpr::pow(RealExpr::Sum(vec![x(), RealExpr::int(1)]), 2),
            RealExpr::pow(RealExpr::Rat(BigRational::new((-1).into(), 3.into())), 2),
            RealExpr::Prod(vec![
                RealExpr::Sin(Box::new(x())),
                RealExpr::Prim("cube".into(), vec![x(), RealExpr::int(2)]),
                RealExpr::Apply {
                    name: "f".into(),
                    partials: vec![0, 1],
                    args: vec![x(), RealExpr::var("y")],
                },
                RealExpr::Apply {
                    name: "g".into(),
                    partials: vec![],
                    args: vec![RealExpr::Exp(Box::new(RealExpr::Cos(Box::new(x()))))],
                },
            ]),
        ]
    }

    #[test]
    fn infix_round_trip() {
        for e in samples() {
            let s = print_infix(&e);
            assert_eq!(parse_infix(&s).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn sexpr_round_trip() {
        for e in samples() {
            let s = print_sexpr(&e);
            assert_eq!(parse_sexpr(&s).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn infix_rendering() {
        let e = RealExpr::Prod(vec![RealExpr::int(2), RealExpr::var("x")]);
        assert_eq!(print_infix(&e), "2*x");
        let s = &samples()[2];
        assert_eq!(print_infix(s), "1/2 + -(1) + -(x + 1)");
    }
}
