//! Surface syntax: a hand-written lexer, a precedence-climbing parser and a
//! printer that emits exactly what the parser reads back.
//!
//! ```text
//! term  ::= \x:T. term | case term of inl x => term | inr y => term | sum
//! sum   ::= sum (+) prod | sum (-) prod | prod
//! prod  ::= prod * app | app
//! app   ::= app atom | pi<j> atom | fix atom | inl atom as T | inr atom as T | atom
//! atom  ::= x | n | n/d | sin | cos | exp | (term) | (term, term, ...)
//!         | D{term ; x @ term} | Int{term dx ; term .. term}
//! T     ::= S -> T | S        S ::= S + A | A        A ::= R | (T) | (T, T, ...)
//! ```

use std::fmt;

use num::BigRational;
use thiserror::Error;

use crate::syntax::{format_rational, is_identifier, parse_rational, Constant, Term, Type, REAL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "fix", "inl", "inr", "as", "case", "of", "D", "Int", "sin", "cos", "exp",
];

/// Names the printer would not read back as variables.
pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name) || projection_index(name).is_some()
}

fn projection_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("pi")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Primitive constants that have a spelling in the surface syntax.
pub fn surface_primitive(name: &str) -> Option<Type> {
    match name {
        "sin" | "cos" | "exp" => Some(Type::arrow(Type::real(), Type::real())),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigRational),
    Proj(usize),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
    DotDot,
    Semi,
    At,
    Arrow,
    FatArrow,
    Bar,
    Plus,
    OPlus,
    OMinus,
    Star,
    Lambda,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(r) => write!(f, "`{}`", format_rational(r)),
            Tok::Proj(j) => write!(f, "`pi{j}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::At => f.write_str("`@`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::OPlus => f.write_str("`(+)`"),
            Tok::OMinus => f.write_str("`(-)`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Lambda => f.write_str("`\\`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let err = |offset: usize, message: String| ParseError { offset, message };
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let rest = &src[i..];
        let simple = [
            ("(+)", Tok::OPlus),
            ("(-)", Tok::OMinus),
            ("->", Tok::Arrow),
            ("=>", Tok::FatArrow),
            ("..", Tok::DotDot),
            ("⊕", Tok::OPlus),
            ("⊖", Tok::OMinus),
            ("→", Tok::Arrow),
            ("λ", Tok::Lambda),
            ("\\", Tok::Lambda),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("{", Tok::LBrace),
            ("}", Tok::RBrace),
            (",", Tok::Comma),
            (":", Tok::Colon),
            (".", Tok::Dot),
            (";", Tok::Semi),
            ("@", Tok::At),
            ("|", Tok::Bar),
            ("+", Tok::Plus),
            ("*", Tok::Star),
        ];
        if let Some((s, tok)) = simple.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push((tok.clone(), i));
            for _ in 0..s.chars().count() {
                chars.next();
            }
            continue;
        }
        if let Some(after) = rest.strip_prefix('π') {
            let len = after.bytes().take_while(|b| b.is_ascii_digit()).count();
            let j: usize = after[..len]
                .parse()
                .map_err(|_| err(i, "expected projection index after `π`".into()))?;
            out.push((Tok::Proj(j), i));
            let end = i + 'π'.len_utf8() + len;
            while chars.peek().is_some_and(|&(k, _)| k < end) {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            let mut end = i + 1;
            let bytes = src.as_bytes();
            while end < src.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end + 1 < src.len() && bytes[end] == b'/' && bytes[end + 1].is_ascii_digit() {
                end += 1;
                while end < src.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
            let text = &src[i..end];
            let r = parse_rational(text).ok_or_else(|| err(i, format!("invalid number `{text}`")))?;
            out.push((Tok::Num(r), i));
            while chars.peek().is_some_and(|&(k, _)| k < end) {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            for (k, ch) in src[i..].char_indices() {
                if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                    end = i + k + ch.len_utf8();
                } else {
                    break;
                }
            }
            let word = &src[i..end];
            match projection_index(word) {
                Some(j) => out.push((Tok::Proj(j), i)),
                None => out.push((Tok::Ident(word.to_string()), i)),
            }
            while chars.peek().is_some_and(|&(k, _)| k < end) {
                chars.next();
            }
            continue;
        }
        return Err(err(i, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("a variable name"),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.unexpected("end of input"),
        }
    }

    // types

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.sum_ty()?;
        if self.eat(&Tok::Arrow) {
            Ok(Type::arrow(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn sum_ty(&mut self) -> Result<Type, ParseError> {
        let mut lhs = self.atom_ty()?;
        while self.eat(&Tok::Plus) {
            lhs = Type::sum(lhs, self.atom_ty()?);
        }
        Ok(lhs)
    }

    fn atom_ty(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                let name = name.clone();
                self.pos += 1;
                Ok(Type::Base(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let first = self.ty()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat(&Tok::Comma) {
                    items.push(self.ty()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Type::Product(items))
            }
            _ => self.unexpected("a type"),
        }
    }

    // terms

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Lambda) {
            let var = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(Term::lam(var, ty, body));
        }
        if self.is_keyword("case") {
            self.pos += 1;
            let scrutinee = self.term()?;
            self.expect_keyword("of")?;
            self.expect_keyword("inl")?;
            let lv = self.ident()?;
            self.expect(Tok::FatArrow)?;
            let left = self.term()?;
            self.expect(Tok::Bar)?;
            self.expect_keyword("inr")?;
            let rv = self.ident()?;
            self.expect(Tok::FatArrow)?;
            let right = self.term()?;
            return Ok(Term::case(scrutinee, lv, left, rv, right));
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(&Tok::OPlus) {
                lhs = Term::add(lhs, self.product()?);
            } else if self.eat(&Tok::OMinus) {
                lhs = Term::sub(lhs, self.product()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.app()?;
        while self.eat(&Tok::Star) {
            lhs = Term::mul(lhs, self.app()?);
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                !KEYWORDS.contains(&s.as_str())
                    || matches!(s.as_str(), "sin" | "cos" | "exp")
                    || (matches!(s.as_str(), "D" | "Int") && self.peek_at(1) == Some(&Tok::LBrace))
            }
            Some(Tok::Num(_) | Tok::LParen) => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut head = match self.peek() {
            Some(Tok::Proj(j)) => {
                let j = *j;
                self.pos += 1;
                Term::proj(j, self.atom()?)
            }
            Some(Tok::Ident(s)) if s == "fix" => {
                self.pos += 1;
                Term::fix(self.atom()?)
            }
            Some(Tok::Ident(s)) if s == "inl" || s == "inr" => {
                let left = s == "inl";
                self.pos += 1;
                let payload = self.atom()?;
                self.expect_keyword("as")?;
                let ty = self.ty()?;
                return Ok(if left {
                    Term::inl(payload, ty)
                } else {
                    Term::inr(payload, ty)
                });
            }
            _ => self.atom()?,
        };
        while self.starts_atom() {
            head = Term::app(head, self.atom()?);
        }
        Ok(head)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Term::rational(r))
            }
            Some(Tok::Ident(s)) if s == "D" && self.peek_at(1) == Some(&Tok::LBrace) => {
                self.pos += 2;
                let body = self.term()?;
                self.expect(Tok::Semi)?;
                let var = self.ident()?;
                self.expect(Tok::At)?;
                let at = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok(Term::der(body, var, at))
            }
            Some(Tok::Ident(s)) if s == "Int" && self.peek_at(1) == Some(&Tok::LBrace) => {
                self.pos += 2;
                self.integral()
            }
            Some(Tok::Ident(s)) => {
                if let Some(ty) = surface_primitive(&s) {
                    self.pos += 1;
                    return Ok(Term::named_const(s, ty));
                }
                Ok(Term::Var(self.ident()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let first = self.term()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat(&Tok::Comma) {
                    items.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Term::Tuple(items))
            }
            _ => self.unexpected("a term"),
        }
    }

    /// After `Int{`: the body runs up to the `d<var>` token that precedes `;`.
    fn integral(&mut self) -> Result<Term, ParseError> {
        let mut depth = 0usize;
        let mut k = self.pos;
        let semi = loop {
            match self.toks.get(k).map(|(t, _)| t) {
                None => return self.error("unterminated integral"),
                Some(Tok::LParen | Tok::LBrace) => depth += 1,
                Some(Tok::RParen | Tok::RBrace) => {
                    if depth == 0 {
                        return self.error("expected `d<var> ;` in integral");
                    }
                    depth -= 1;
                }
                Some(Tok::Semi) if depth == 0 => break k,
                _ => {}
            }
            k += 1;
        };
        let var = match self.toks.get(semi.wrapping_sub(1)).map(|(t, _)| t) {
            Some(Tok::Ident(d)) if semi > self.pos + 1 => match d.strip_prefix('d') {
                Some(v) if is_identifier(v) && !is_reserved(v) => v.to_string(),
                _ => return self.error(format!("expected integration variable `d<var>`, found `{d}`")),
            },
            _ => return self.error("expected integration variable `d<var>` before `;`"),
        };
        let mut inner = Parser {
            toks: self.toks[self.pos..semi - 1].to_vec(),
            pos: 0,
            end: self.toks[semi - 1].1,
        };
        let body = inner.term()?;
        inner.finish()?;
        self.pos = semi + 1;
        let lo = self.term()?;
        self.expect(Tok::DotDot)?;
        let hi = self.term()?;
        self.expect(Tok::RBrace)?;
        Ok(Term::int(lo, hi, body, var))
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Style {
    pub unicode: bool,
}

impl Style {
    pub const ASCII: Style = Style { unicode: false };
    pub const UNICODE: Style = Style { unicode: true };

    fn plus(self) -> &'static str {
        if self.unicode {
            "⊕"
        } else {
            "(+)"
        }
    }

    fn minus(self) -> &'static str {
        if self.unicode {
            "⊖"
        } else {
            "(-)"
        }
    }

    fn arrow(self) -> &'static str {
        if self.unicode {
            "→"
        } else {
            "->"
        }
    }
}

pub fn print_type(ty: &Type, style: Style) -> String {
    let mut s = String::new();
    write_type(&mut s, ty, style, 0);
    s
}

// 0: arrow, 1: sum operand, 2: atom
fn write_type(out: &mut String, ty: &Type, style: Style, level: u8) {
    match ty {
        Type::Base(n) => out.push_str(n),
        Type::Product(items) => {
            out.push('(');
            for (i, t) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_type(out, t, style, 0);
            }
            out.push(')');
        }
        Type::Arrow(a, b) => {
            if level > 0 {
                out.push('(');
            }
            write_type(out, a, style, 1);
            out.push_str(style.arrow());
            write_type(out, b, style, 0);
            if level > 0 {
                out.push(')');
            }
        }
        Type::Sum(a, b) => {
            if level > 1 {
                out.push('(');
            }
            write_type(out, a, style, 1);
            out.push('+');
            write_type(out, b, style, 2);
            if level > 1 {
                out.push(')');
            }
        }
    }
}

pub fn print_term(t: &Term, style: Style) -> String {
    let mut s = String::new();
    write_term(&mut s, t, style, Prec::Top);
    s
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Sum,
    Prod,
    App,
    Atom,
}

fn prec_of(t: &Term) -> Prec {
    match t {
        Term::Lam { .. } | Term::Case { .. } => Prec::Top,
        Term::Add(..) | Term::Sub(..) => Prec::Sum,
        Term::Mul(..) => Prec::Prod,
        Term::App(..) | Term::Proj { .. } | Term::Fix(_) | Term::Inl { .. } | Term::Inr { .. } => {
            Prec::App
        }
        _ => Prec::Atom,
    }
}

fn write_term(out: &mut String, t: &Term, style: Style, ctx: Prec) {
    let paren = prec_of(t) < ctx;
    if paren {
        out.push('(');
    }
    match t {
        Term::Const { value, .. } => out.push_str(&value.to_string()),
        Term::Var(x) => out.push_str(x),
        Term::Lam { var, ty, body } => {
            out.push_str(if style.unicode { "λ" } else { "\\" });
            out.push_str(var);
            out.push(':');
            write_type(out, ty, style, 0);
            out.push_str(". ");
            write_term(out, body, style, Prec::Top);
        }
        Term::App(f, a) => {
            // injections cannot be applied without parentheses
            let fp = if matches!(**f, Term::Inl { .. } | Term::Inr { .. }) {
                Prec::Atom
            } else {
                Prec::App
            };
            write_term(out, f, style, fp);
            out.push(' ');
            write_term(out, a, style, Prec::Atom);
        }
        Term::Tuple(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(out, item, style, Prec::Top);
            }
            out.push(')');
        }
        Term::Proj { index, tuple } => {
            out.push_str(if style.unicode { "π" } else { "pi" });
            out.push_str(&index.to_string());
            out.push(' ');
            write_term(out, tuple, style, Prec::Atom);
        }
        Term::Add(l, r) | Term::Sub(l, r) => {
            write_term(out, l, style, Prec::Sum);
            out.push(' ');
            out.push_str(if matches!(t, Term::Add(..)) {
                style.plus()
            } else {
                style.minus()
            });
            out.push(' ');
            write_term(out, r, style, Prec::Prod);
        }
        Term::Mul(l, r) => {
            write_term(out, l, style, Prec::Prod);
            out.push_str(" * ");
            write_term(out, r, style, Prec::App);
        }
        Term::Der { body, var, at } => {
            out.push_str("D{");
            write_term(out, body, style, Prec::Top);
            out.push_str(" ; ");
            out.push_str(var);
            out.push_str(" @ ");
            write_term(out, at, style, Prec::Top);
            out.push('}');
        }
        Term::Int { lo, hi, body, var } => {
            out.push_str("Int{");
            write_term(out, body, style, Prec::Top);
            out.push_str(" d");
            out.push_str(var);
            out.push_str(" ; ");
            write_term(out, lo, style, Prec::Top);
            out.push_str(" .. ");
            write_term(out, hi, style, Prec::Top);
            out.push('}');
        }
        Term::Inl { term, ty } | Term::Inr { term, ty } => {
            out.push_str(if matches!(t, Term::Inl { .. }) {
                "inl "
            } else {
                "inr "
            });
            write_term(out, term, style, Prec::Atom);
            out.push_str(" as ");
            write_type(out, ty, style, 0);
        }
        Term::Case {
            scrutinee,
            left_var,
            left,
            right_var,
            right,
        } => {
            out.push_str("case ");
            write_term(out, scrutinee, style, Prec::Top);
            out.push_str(" of inl ");
            out.push_str(left_var);
            out.push_str(" => ");
            // a trailing binder form would swallow the `|`
            let lp = if ends_open(left) { Prec::Sum } else { Prec::Top };
            write_term(out, left, style, lp);
            out.push_str(" | inr ");
            out.push_str(right_var);
            out.push_str(" => ");
            write_term(out, right, style, Prec::Top);
        }
        Term::Fix(f) => {
            out.push_str("fix ");
            write_term(out, f, style, Prec::Atom);
        }
    }
    if paren {
        out.push(')');
    }
}

fn ends_open(t: &Term) -> bool {
    matches!(t, Term::Lam { .. } | Term::Case { .. })
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self, Style::ASCII))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self, Style::ASCII))
    }
}

/// Whether the text printer can represent `t` so that it parses back identically.
pub fn printable(t: &Term) -> bool {
    let ok_var = |x: &str| is_identifier(x) && !is_reserved(x);
    let here = match t {
        Term::Const { value, ty } => match value {
            Constant::Num(_) => *ty == Type::Base(REAL.to_string()),
            Constant::Named(n) => surface_primitive(n).as_ref() == Some(ty),
        },
        Term::Var(x) => ok_var(x),
        Term::Lam { var, .. } | Term::Der { var, .. } | Term::Int { var, .. } => ok_var(var),
        Term::Case {
            left_var,
            right_var,
            ..
        } => ok_var(left_var) && ok_var(right_var),
        Term::Tuple(items) => items.len() >= 2,
        _ => true,
    };
    here && t.children().into_iter().all(printable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> Type {
        Type::real()
    }

    fn round_trip(src: &str) {
        let t = parse_term(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        let printed = print_term(&t, Style::ASCII);
        assert_eq!(parse_term(&printed).unwrap(), t, "{printed}");
        let uni = print_term(&t, Style::UNICODE);
        assert_eq!(parse_term(&uni).unwrap(), t, "{uni}");
    }

    #[test]
    fn parses_pair_function() {
        let t = parse_term(r"\x:(R,R).(pi1 x (+) pi2 x, pi1 x * pi2 x, pi2 x)").unwrap();
        let x = || Term::var("x");
        let expected = Term::lam(
            "x",
            Type::product(vec![r(), r()]),
            Term::tuple(vec![
                Term::add(Term::proj(1, x()), Term::proj(2, x())),
                Term::mul(Term::proj(1, x()), Term::proj(2, x())),
                Term::proj(2, x()),
            ]),
        );
        assert_eq!(t, expected);
        assert_eq!(
            print_term(&t, Style::ASCII),
            r"\x:(R,R). (pi1 x (+) pi2 x,pi1 x * pi2 x,pi2 x)"
        );
    }

    #[test]
    fn operator_precedence_and_associativity() {
        let t = parse_term("a (+) b * c (-) d").unwrap();
        let v = Term::var;
        assert_eq!(
            t,
            Term::sub(Term::add(v("a"), Term::mul(v("b"), v("c"))), v("d"))
        );
        let t = parse_term("a (-) (b (-) c)").unwrap();
        assert_eq!(t, Term::sub(v("a"), Term::sub(v("b"), v("c"))));
        assert_eq!(print_term(&t, Style::ASCII), "a (-) (b (-) c)");
        let t = parse_term("f a b").unwrap();
        assert_eq!(t, Term::app(Term::app(v("f"), v("a")), v("b")));
    }

    #[test]
    fn types_parse_with_expected_associativity() {
        assert_eq!(
            parse_type("R->R->R").unwrap(),
            Type::arrow(r(), Type::arrow(r(), r()))
        );
        assert_eq!(
            parse_type("R+R->R").unwrap(),
            Type::arrow(Type::sum(r(), r()), r())
        );
        let t = Type::arrow(Type::arrow(r(), r()), Type::product(vec![r(), Type::sum(r(), r())]));
        assert_eq!(print_type(&t, Style::ASCII), "(R->R)->(R,R+R)");
        assert_eq!(parse_type(&print_type(&t, Style::ASCII)).unwrap(), t);
    }

    #[test]
    fn derivative_and_integral_forms() {
        let t = parse_term("Int{D{f y ; y @ x} dx ; (0,0) .. (2,3)}").unwrap();
        let expected = Term::int(
            Term::tuple(vec![Term::num(0), Term::num(0)]),
            Term::tuple(vec![Term::num(2), Term::num(3)]),
            Term::der(Term::app(Term::var("f"), Term::var("y")), "y", Term::var("x")),
            "x",
        );
        assert_eq!(t, expected);
        round_trip("Int{D{f y ; y @ x} dx ; (0,0) .. (2,3)}");
        round_trip("Int{a (+) g b dx ; 0 .. 1}");
    }

    #[test]
    fn injections_and_case() {
        let t = parse_term("inl 0 as R+R (+) inr 1 as R+R").unwrap();
        let s = Type::sum(r(), r());
        assert_eq!(
            t,
            Term::add(Term::inl(Term::num(0), s.clone()), Term::inr(Term::num(1), s))
        );
        round_trip("inl 0 as R+R (+) inr 1 as R+R");
        round_trip(r"case inl 1 as R+R of inl a => (\y:R. y) | inr b => \z:R. z (+) b");
        round_trip("case s of inl a => (case t of inl p => p | inr q => q) | inr b => b");
    }

    #[test]
    fn literals_and_primitives() {
        let t = parse_term("1/2 * -3 (+) sin x").unwrap();
        assert_eq!(
            t,
            Term::add(
                Term::mul(Term::ratio(1, 2), Term::num(-3)),
                Term::app(Term::named_const("sin", Type::arrow(r(), r())), Term::var("x"))
            )
        );
        round_trip("1/2 * -3 (+) sin x");
    }

    #[test]
    fn unicode_spellings() {
        let t = parse_term("λx:R→R. π1 (x 1, 2) ⊕ 3 ⊖ 4").unwrap();
        let ascii = parse_term(r"\x:R->R. pi1 (x 1,2) (+) 3 (-) 4").unwrap();
        assert_eq!(t, ascii);
    }

    #[test]
    fn fix_and_projection_heads_apply() {
        round_trip(r"fix (\f:R->R. f) 3");
        round_trip("pi1 p q");
        round_trip("(inl a as R+R) b");
    }

    #[test]
    fn errors_report_offsets() {
        let e = parse_term("(1,").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(parse_term("Int{x ; 0 .. 1}").is_err());
        assert!(parse_term(r"\fix:R. fix").is_err());
    }
}
