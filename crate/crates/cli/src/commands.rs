use std::fmt::Write;

use diffcalc::builtins::BUILTINS;
use diffcalc::discrete::{self, derive_fn, discrete_normalize, from_term, DTerm};
use diffcalc::embed::simplify;
use diffcalc::equality::{term_eq, EqConfig};
use diffcalc::real::PrimTable;
use diffcalc::reduce::{normalize, normalize_with, Fuel, Options, Strategy};
use diffcalc::suites;
use diffcalc::text::{self, Style};
use diffcalc::theorems::{
    ad_gradient, check_chain_rule, check_incremental, check_newton_leibniz, check_taylor, derive_incremental,
    taylor_expand, TheoremReport,
};
use diffcalc::typeck::typecheck;
use diffcalc::{sexpr, Term, TypingContext};
use serde_json::{json, Value};

use crate::input::{load, read_source, CliError};
use crate::{Cli, Command, Format, Global};

fn style(g: &Global) -> Style {
    if g.unicode {
        Style::UNICODE
    } else {
        Style::ASCII
    }
}

fn show(g: &Global, t: &Term) -> String {
    text::print_term(t, style(g))
}

fn eq_config(g: &Global) -> EqConfig {
    EqConfig {
        fuel: Fuel::new(g.fuel),
        ..EqConfig::with_seed(g.seed)
    }
}

fn pretty(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json") + "\n"
}

fn display_nf(ctx: &TypingContext, t: &Term, g: &Global) -> Result<Term, CliError> {
    let n = normalize(ctx, t, Fuel::new(g.fuel))?;
    Ok(simplify(ctx, &n, PrimTable::shared()))
}

/// One term in the selected output format.
fn emit_term(g: &Global, key: &str, t: &Term) -> String {
    match g.format {
        Format::Text => show(g, t) + "\n",
        Format::Sexpr => sexpr::print_term(t) + "\n",
        Format::Json => pretty(json!({ key: show(g, t) })),
    }
}

fn emit_report(g: &Global, r: &TheoremReport) -> String {
    match g.format {
        Format::Json => pretty(serde_json::to_value(r).expect("report")),
        Format::Text | Format::Sexpr => {
            let mut out = String::new();
            writeln!(out, "theorem: {}", r.theorem).unwrap();
            writeln!(out, "verdict: {}", serde_json::to_value(r.verdict).unwrap().as_str().unwrap()).unwrap();
            writeln!(out, "lhs: {}", r.lhs_nf.as_deref().unwrap_or("?")).unwrap();
            writeln!(out, "rhs: {}", r.rhs_nf.as_deref().unwrap_or("?")).unwrap();
            if let Some(w) = &r.witness {
                writeln!(out, "witness: {}", serde_json::to_string(w).unwrap()).unwrap();
            }
            out
        }
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { term, file } => {
            let src = read_source(term.as_deref(), file.as_deref())?;
            let (ctx, ts) = load(g, &[&src], &[])?;
            let ty = typecheck(&ctx, &ts[0])?;
            Ok(match g.format {
                Format::Text => text::print_type(&ty, style(g)) + "\n",
                Format::Sexpr => sexpr::print_type(&ty) + "\n",
                Format::Json => pretty(json!({ "term": show(g, &ts[0]), "type": text::print_type(&ty, Style::ASCII) })),
            })
        }
        Command::Norm {
            term,
            file,
            trace,
            raw,
            random,
        } => {
            let src = read_source(term.as_deref(), file.as_deref())?;
            let (ctx, ts) = load(g, &[&src], &[])?;
            norm(g, &ctx, &ts[0], *trace, *raw, *random)
        }
        Command::Eq { lhs, rhs, trials } => {
            let (ctx, ts) = load(g, &[lhs, rhs], &[])?;
            let cfg = EqConfig {
                trials: *trials,
                ..eq_config(g)
            };
            let o = term_eq(&ctx, &ts[0], &ts[1], &cfg)?;
            Ok(match g.format {
                Format::Json => pretty(serde_json::to_value(&o).unwrap()),
                _ => {
                    let mut out = String::from(if o.equal { "equal\n" } else { "not equal\n" });
                    if let Some(w) = &o.witness {
                        for (x, v) in &w.substitution {
                            writeln!(out, "  {x} := {v}").unwrap();
                        }
                        writeln!(out, "  lhs: {}\n  rhs: {}", w.lhs_nf, w.rhs_nf).unwrap();
                    }
                    out
                }
            })
        }
        Command::Nl { t, y, from, to } => {
            let (ctx, ts) = load(g, &[t, from, to], &[y])?;
            let r = check_newton_leibniz(&ctx, &ts[0], y, &ts[1], &ts[2], &eq_config(g))?;
            Ok(emit_report(g, &r))
        }
        Command::Chain { f, g: gf, at, dir } => {
            let (ctx, ts) = load(g, &[f, gf, at, dir], &[])?;
            let r = check_chain_rule(&ctx, &ts[0], &ts[1], &ts[2], &ts[3], &eq_config(g))?;
            Ok(emit_report(g, &r))
        }
        Command::Taylor { f, at, order, wrt } => {
            let (ctx, mut ts) = load(g, &[f, at, wrt], &[])?;
            ts[2] = Term::add(ts[1].clone(), ts[2].clone());
            let exp = taylor_expand(&ctx, &ts[0], &ts[1], &ts[2], *order)?;
            let shown = display_nf(&ctx, exp.term(), g)?;
            if g.format != Format::Json {
                let r = check_taylor(&ctx, &ts[0], &ts[1], &ts[2], *order, &eq_config(g))?;
                let mut out = emit_term(g, "expansion", &shown);
                if g.format == Format::Text {
                    writeln!(out, "exact: {}", r.holds()).unwrap();
                }
                return Ok(out);
            }
            let partial: Vec<String> = exp
                .partial_sums
                .iter()
                .map(|s| display_nf(&ctx, s, g).map(|t| show(g, &t)))
                .collect::<Result<_, _>>()?;
            let r = check_taylor(&ctx, &ts[0], &ts[1], &ts[2], *order, &eq_config(g))?;
            Ok(pretty(json!({
                "expansion": show(g, &shown),
                "partial_sums": partial,
                "coefficients": exp.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "exact": r.holds(),
                "report": r,
            })))
        }
        Command::Ad { f, at } => {
            let (ctx, ts) = load(g, &[f, at], &[])?;
            let grad = ad_gradient(&ctx, &ts[0], &ts[1])?;
            Ok(emit_term(g, "gradient", &grad))
        }
        Command::Inc { f, at, delta } => {
            let (ctx, ts) = load(g, &[f, at, delta], &[])?;
            let inc = derive_incremental(&ctx, &ts[0], &ts[1], &ts[2])?;
            if g.format == Format::Json {
                let r = check_incremental(&ctx, &ts[0], &ts[1], &ts[2], &eq_config(g))?;
                return Ok(pretty(json!({ "increment": show(g, &inc), "report": r })));
            }
            Ok(emit_term(g, "increment", &inc))
        }
        Command::Discrete { f, at, delta, trace } => run_discrete(g, f, at, delta, *trace),
        Command::Verify { suite, cases } => verify(g, suite, *cases),
        Command::Builtins => Ok(BUILTINS.iter().map(|(n, d)| format!("{n} = {d}\n")).collect()),
    }
}

fn norm(g: &Global, ctx: &TypingContext, t: &Term, trace: bool, raw: bool, random: bool) -> Result<String, CliError> {
    let ty = typecheck(ctx, t)?;
    let opts = Options {
        fuel: Fuel::new(g.fuel),
        strategy: if random { Strategy::Random(g.seed) } else { Strategy::LeftmostOutermost },
        trace,
    };
    let n = normalize_with(ctx, t, &opts)?;
    let shown = if raw { n.term.clone() } else { simplify(ctx, &n.term, PrimTable::shared()) };
    let steps = n.trace.map(|tr| tr.steps).unwrap_or_default();
    Ok(match g.format {
        Format::Text => {
            let mut out = String::new();
            for (i, s) in steps.iter().enumerate() {
                writeln!(out, "{}", s.render(i + 1, style(g))).unwrap();
            }
            out + &show(g, &shown) + "\n"
        }
        Format::Sexpr => {
            let mut out = String::new();
            for s in &steps {
                let path: Vec<String> = s.path.iter().map(|i| i.to_string()).collect();
                writeln!(
                    out,
                    "(step {} ({}) {} {})",
                    s.rule,
                    path.join(" "),
                    sexpr::print_term(&s.before),
                    sexpr::print_term(&s.after)
                )
                .unwrap();
            }
            out + &sexpr::print_term(&shown) + "\n"
        }
        Format::Json => {
            let trace: Vec<Value> = steps
                .iter()
                .map(|s| {
                    json!({
                        "rule": s.rule.to_string(),
                        "path": s.path,
                        "before": show(g, &s.before),
                        "after": show(g, &s.after),
                    })
                })
                .collect();
            let mut v = json!({
                "input": show(g, t),
                "type": text::print_type(&ty, Style::ASCII),
                "normal_form": show(g, &n.term),
                "display": show(g, &shown),
                "steps": n.steps,
            });
            if !trace.is_empty() {
                v["trace"] = Value::Array(trace);
            }
            pretty(v)
        }
    })
}

fn run_discrete(g: &Global, f: &str, at: &str, delta: &str, trace: bool) -> Result<String, CliError> {
    let (ctx, ts) = load(g, &[f, at, delta], &[])?;
    let conv = |t: &Term| from_term(t).map_err(|e| CliError::Input(e.to_string()));
    let (df, x, dx) = (conv(&ts[0])?, conv(&ts[1])?, conv(&ts[2])?);
    let derive = derive_fn(&ctx, &df).map_err(|e| CliError::Other(e.to_string()))?;
    let applied = DTerm::app(DTerm::app(derive.clone(), x.clone()), dx.clone());
    discrete::typecheck(&ctx, &applied).map_err(|e| CliError::Other(e.to_string()))?;
    let (nf, steps) = discrete_normalize(&applied, Fuel::new(g.fuel)).map_err(|e| match e {
        discrete::DiscreteError::FuelExhausted(n) => CliError::Fuel(format!("fuel exhausted after {n} steps")),
        other => CliError::Other(other.to_string()),
    })?;
    let value = display_nf(&ctx, &discrete::to_term(&nf), g)?;
    let eq = discrete::check_defining_equation(&ctx, &df, &x, &dx, &eq_config(g))
        .map_err(|e| CliError::Other(e.to_string()))?;
    Ok(match g.format {
        Format::Json => {
            let mut v = json!({
                "derive": derive.to_string(),
                "normal_form": nf.to_string(),
                "value": show(g, &value),
                "defining_equation": eq.equal,
            });
            if trace {
                v["trace"] = serde_json::to_value(&steps).unwrap();
            }
            pretty(v)
        }
        Format::Sexpr => sexpr::print_term(&value) + "\n",
        Format::Text => {
            let mut out = String::new();
            if trace {
                for (i, s) in steps.iter().enumerate() {
                    writeln!(out, "#{} {} @ {:?}: {} ⟶ {}", i + 1, s.rule, s.path, s.before, s.after).unwrap();
                }
            }
            writeln!(out, "normal form: {nf}").unwrap();
            writeln!(out, "value: {}", show(g, &value)).unwrap();
            writeln!(out, "defining equation: {}", if eq.equal { "holds" } else { "fails" }).unwrap();
            out
        }
    })
}

fn verify(g: &Global, suite: &str, cases: Option<usize>) -> Result<String, CliError> {
    let reports = if suite == "all" {
        suites::SUITES
            .iter()
            .flat_map(|s| suites::run(s, g.seed, cases).expect("known suite"))
            .collect()
    } else {
        suites::run(suite, g.seed, cases).ok_or_else(|| {
            CliError::Input(format!("unknown suite `{suite}`; known: all, {}", suites::SUITES.join(", ")))
        })?
    };
    let out = match g.format {
        Format::Json => pretty(serde_json::to_value(&reports).unwrap()),
        _ => {
            let mut out = String::new();
            for r in &reports {
                writeln!(
                    out,
                    "{:<28} {:>4} cases  {:>3} failed  {:>3} inconclusive  {}",
                    r.name,
                    r.cases,
                    r.failures,
                    r.inconclusive,
                    if r.passed() { "ok" } else { "FAILED" }
                )
                .unwrap();
                for e in &r.examples {
                    writeln!(out, "    {e}").unwrap();
                }
            }
            out
        }
    };
    if reports.iter().all(|r| r.passed()) {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::SuiteFailed("some suites failed".into()))
    }
}
