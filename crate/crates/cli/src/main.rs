mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "diffcalc", version, about = "Analytical differential lambda calculus: typecheck, normalize, compare and verify")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Maximum number of reduction steps.
    #[arg(long, global = true, default_value_t = diffcalc::reduce::DEFAULT_FUEL)]
    pub fuel: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print ⊕, ⊖, λ and friends instead of ASCII spellings.
    #[arg(long, global = true)]
    pub unicode: bool,
    /// Read terms as S-expressions instead of surface syntax.
    #[arg(long, global = true)]
    pub sexpr_input: bool,
    /// Type of a free variable, as `name:T`. Unlisted free variables are taken to be `R`.
    #[arg(long = "var", global = true, value_name = "NAME:TYPE")]
    pub vars: Vec<String>,
    /// Seed for randomized equality trials and suites.
    #[arg(long, global = true, env = "DIFFCALC_SEED", default_value_t = diffcalc::equality::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Sexpr,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Typecheck a term and print its type.
    Check {
        /// The term; read from stdin when absent or `-`.
        term: Option<String>,
        /// Read the term from a file.
        #[arg(long, short)]
        file: Option<std::path::PathBuf>,
    },
    /// Normalize a term.
    Norm {
        term: Option<String>,
        #[arg(long, short)]
        file: Option<std::path::PathBuf>,
        /// Print every reduction step.
        #[arg(long)]
        trace: bool,
        /// Show the normal form without base-type simplification.
        #[arg(long)]
        raw: bool,
        /// Choose redexes at random instead of leftmost-outermost.
        #[arg(long)]
        random: bool,
    },
    /// Decide whether two terms are equal.
    Eq {
        lhs: String,
        rhs: String,
        #[arg(long, default_value_t = diffcalc::equality::DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Check the Newton-Leibniz formula for `t` over `y` between two points.
    Nl {
        #[arg(long)]
        t: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Check the Chain Rule for `f` after `g` at a point along a direction.
    Chain {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        dir: String,
    },
    /// Taylor-expand `f` around `at`, evaluated at `at (+) wrt`.
    Taylor {
        #[arg(long)]
        f: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        wrt: String,
    },
    /// Gradient of `f` at a point.
    Ad {
        #[arg(long)]
        f: String,
        #[arg(long)]
        at: String,
    },
    /// Change of `f` when its argument moves by `delta`.
    Inc {
        #[arg(long)]
        f: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        delta: String,
    },
    /// Discrete derivative `Derive f x dx` and its defining equation.
    Discrete {
        #[arg(long)]
        f: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        trace: bool,
    },
    /// Run randomized property suites.
    Verify {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Override the number of cases per suite.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// List the named built-in programs.
    Builtins,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
