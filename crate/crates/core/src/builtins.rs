//! Named demo programs. A free variable carrying one of these names, and not
//! bound by the typing context, is replaced by its definition.

use std::collections::BTreeMap;

use crate::syntax::{free_vars, substitute_all, Term, TypingContext};
use crate::text::parse_term;

pub const BUILTINS: &[(&str, &str)] = &[
    ("f", r"\x:(R,R). (pi1 x (+) pi2 x, pi1 x * pi2 x, pi2 x)"),
    ("g", r"\x:(R,R). (pi1 x (+) pi2 x, pi2 x)"),
    ("sqr", r"\a:R. a * a"),
    ("magSqr", r"\x:(R,R). (\a:R. a * a) (pi1 x) (+) (\a:R. a * a) (pi2 x)"),
    ("average", r"\x:(R,R). (pi1 x (+) pi2 x) * 1/2"),
    ("polar2cartesian", r"\x:(R,R). (pi1 x * cos (pi2 x), pi1 x * sin (pi2 x))"),
    ("taylor_f", r"\x:(R,R). (2 * pi1 x * pi2 x, 3 * pi1 x * pi1 x (+) pi2 x)"),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn lookup(name: &str) -> Option<Term> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_term(src).expect("builtin parses"))
}

/// Replaces free occurrences of built-in names that `ctx` does not bind.
pub fn resolve(ctx: &TypingContext, t: &Term) -> Term {
    let map: BTreeMap<String, Term> = free_vars(t)
        .into_iter()
        .filter(|x| !ctx.contains(x))
        .filter_map(|x| lookup(&x).map(|d| (x, d)))
        .collect();
    if map.is_empty() {
        t.clone()
    } else {
        substitute_all(t, &map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::print_type;
    use crate::typeck::typecheck;

    #[test]
    fn builtins_typecheck() {
        let ctx = TypingContext::new();
        for name in names() {
            let ty = typecheck(&ctx, &lookup(name).unwrap()).unwrap();
            assert!(print_type(&ty, crate::text::Style::ASCII).starts_with("(R,R)->") || name == "sqr", "{name}");
        }
    }

    #[test]
    fn resolution_respects_context() {
        let t = parse_term("f (1,2) (+) f (3,4)").unwrap();
        assert!(free_vars(&resolve(&TypingContext::new(), &t)).is_empty());
        let ctx = TypingContext::new().with("f", crate::text::parse_type("(R,R)->(R,R,R)").unwrap());
        assert_eq!(resolve(&ctx, &t), t);
    }
}
