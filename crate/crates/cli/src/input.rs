use std::fmt;
use std::io::Read;
use std::path::Path;

use diffcalc::equality::EqError;
use diffcalc::reduce::ReduceError;
use diffcalc::theorems::TheoremError;
use diffcalc::typeck::TypeError;
use diffcalc::{builtins, free_vars, sexpr, text, Term, Type, TypingContext};

use crate::Global;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Type(TypeError),
    Fuel(String),
    Undefined(String),
    Other(String),
    SuiteFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Type(_) | CliError::Other(_) => 1,
            CliError::Fuel(_) => 2,
            CliError::Undefined(_) => 3,
            CliError::SuiteFailed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Type(e) => write!(f, "error[{}]: {e}", e.kind),
            CliError::Fuel(m) => write!(f, "error: {m}"),
            CliError::Undefined(m) => write!(f, "error: equality undefined: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
            CliError::SuiteFailed(m) => write!(f, "{m}"),
        }
    }
}

impl From<TypeError> for CliError {
    fn from(e: TypeError) -> Self {
        CliError::Type(e)
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::FuelExhausted { steps, .. } => {
                CliError::Fuel(format!("fuel exhausted after {steps} steps (raise --fuel)"))
            }
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<EqError> for CliError {
    fn from(e: EqError) -> Self {
        match e {
            EqError::Type(t) => CliError::Type(t),
            EqError::Undefined(r) => CliError::Undefined(r.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<TheoremError> for CliError {
    fn from(e: TheoremError) -> Self {
        match e {
            TheoremError::Type(t) => CliError::Type(t),
            TheoremError::Reduce(r) => r.into(),
            TheoremError::Eq(q) => q.into(),
            other => CliError::Other(other.to_string()),
        }
    }
}

pub fn read_source(term: Option<&str>, file: Option<&Path>) -> Result<String, CliError> {
    match (term, file) {
        (_, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        (Some(t), None) if t != "-" => Ok(t.to_string()),
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

pub fn parse(g: &Global, src: &str) -> Result<Term, CliError> {
    let src = src.trim();
    if g.sexpr_input {
        sexpr::parse_term(src).map_err(|e| CliError::Input(e.to_string()))
    } else {
        text::parse_term(src).map_err(|e| CliError::Input(e.to_string()))
    }
}

fn declared(g: &Global) -> Result<TypingContext, CliError> {
    let mut ctx = TypingContext::new();
    for decl in &g.vars {
        let (name, ty) = decl
            .split_once(':')
            .ok_or_else(|| CliError::Input(format!("`{decl}` is not of the form name:TYPE")))?;
        let ty = text::parse_type(ty.trim()).map_err(|e| CliError::Input(e.to_string()))?;
        ctx.push(name.trim(), ty);
    }
    Ok(ctx)
}

/// Parses the given sources, expands built-in names and gives every other
/// free variable (except `bound`) the type declared with `--var`, or `R`.
pub fn load(g: &Global, sources: &[&str], bound: &[&str]) -> Result<(TypingContext, Vec<Term>), CliError> {
    let mut ctx = declared(g)?;
    let terms: Vec<Term> = sources
        .iter()
        .map(|s| parse(g, s).map(|t| builtins::resolve(&ctx, &t)))
        .collect::<Result<_, _>>()?;
    for t in &terms {
        for x in free_vars(t) {
            if !ctx.contains(&x) && !bound.contains(&x.as_str()) {
                ctx.push(x, Type::real());
            }
        }
    }
    Ok((ctx, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Format;

    fn global(vars: &[&str]) -> Global {
        Global {
            fuel: 1000,
            format: Format::Text,
            unicode: false,
            sexpr_input: false,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            seed: 0,
        }
    }

    #[test]
    fn free_variables_default_to_reals() {
        let (ctx, ts) = load(&global(&["p:(R,R)"]), &["pi1 p (+) a", "f (b,c)"], &[]).unwrap();
        assert_eq!(ctx.lookup("a"), Some(&Type::real()));
        assert_eq!(ctx.lookup("p").unwrap().to_string(), "(R,R)");
        assert!(!ctx.contains("f"));
        assert!(free_vars(&ts[1]).iter().all(|x| x == "b" || x == "c"));
    }

    #[test]
    fn bound_names_stay_out_of_context() {
        let (ctx, _) = load(&global(&[]), &["y (+) 1"], &["y"]).unwrap();
        assert!(!ctx.contains("y"));
    }

    #[test]
    fn bad_declarations_are_input_errors() {
        assert_eq!(load(&global(&["x"]), &["x"], &[]).unwrap_err().exit_code(), 1);
        assert_eq!(load(&global(&["x:Q->"]), &["x"], &[]).unwrap_err().exit_code(), 1);
    }
}
