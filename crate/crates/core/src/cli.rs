//! Command-line driver: `verify <suite>` and `texpr check <identity>`.

use std::ffi::OsString;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::presentations::{generator_matrix, Family, Presentation};
use crate::qscalar::Scalar;
use crate::report::{Check, Report, Status};
use crate::suites::{run_suite, SuiteConfig, DEFAULT_SEED};
use crate::supertensor::{build_j, build_r_minus, build_r_plus, build_s, build_s_inv, build_s_j, build_s_tilde};
use crate::texpr::{check_identity, parse, Env, Expr, Label, Symbol};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

const MAX_N: usize = 3;
const MAX_FRAMES: usize = 3;
const MAX_DEGREE: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "uqqn", version, about = "Exact checks for braided tensor products of U_q(q_n)-module superalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        opts: Opts,
    },
    /// Tensor-leg expressions.
    Texpr {
        #[command(subcommand)]
        action: TexprCmd,
    },
}

#[derive(Subcommand, Debug)]
enum TexprCmd {
    /// Check an identity such as "S^{12} S^{13} S^{23} == S^{23} S^{13} S^{12}".
    Check {
        identity: String,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    Ybe,
    Presentation,
    Action,
    Braiding,
    Iso,
    DualLemma,
    Invariants,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Ybe => "ybe",
            Suite::Presentation => "presentation",
            Suite::Action => "action",
            Suite::Braiding => "braiding",
            Suite::Iso => "iso",
            Suite::DualLemma => "dual-lemma",
            Suite::Invariants => "invariants",
            Suite::All => "all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
    /// Accept parameters above n <= 3, frames <= 3, degree <= 4.
    #[arg(long)]
    allow_large: bool,
}

impl Opts {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            n: self.n,
            r: self.r,
            k: self.k,
            s: self.s,
            l: self.l,
            max_degree: self.max_degree,
            trials: self.trials,
            seed: self.seed,
        }
    }

    fn bounds_violation(&self) -> Option<String> {
        let mut bad = Vec::new();
        if let Some(n) = self.n.filter(|&n| n == 0 || n > MAX_N) {
            bad.push(format!("n = {n} outside 1..={MAX_N}"));
        }
        for (name, v) in [("r", self.r), ("k", self.k), ("s", self.s), ("l", self.l)] {
            if let Some(v) = v.filter(|&v| v > MAX_FRAMES) {
                bad.push(format!("{name} = {v} exceeds {MAX_FRAMES}"));
            }
        }
        if self.max_degree > MAX_DEGREE {
            bad.push(format!("max-degree = {} exceeds {MAX_DEGREE}", self.max_degree));
        }
        (!bad.is_empty()).then(|| bad.join("; "))
    }
}

fn symbol_json(s: &Symbol) -> Value {
    let labels: Vec<Value> = s
        .labels
        .iter()
        .map(|l| match l {
            Label::Leg(i) => json!({ "leg": i }),
            Label::Slot { idx, primed } => json!({ "slot": idx, "primed": primed }),
        })
        .collect();
    json!({ "name": s.name, "labels": labels })
}

fn ast_json(e: &Expr) -> Value {
    let side = |p: &[Symbol]| Value::Array(p.iter().map(symbol_json).collect());
    match e {
        Expr::Product(p) => json!({ "product": side(p), "text": e.to_string() }),
        Expr::Equation(l, r) => json!({ "lhs": side(l), "rhs": side(r), "text": e.to_string() }),
    }
}

/// Environment for ad-hoc identities: all named operators and generator matrices.
pub fn texpr_env(frames: usize, n: usize) -> crate::Result<Env<Scalar>> {
    let mut env = Env::new();
    env.bind_op("S", build_s(n))
        .bind_op("Sinv", build_s_inv(n))
        .bind_op("SJ", build_s_j(n))
        .bind_op("J", build_j(n))
        .bind_op("Stilde", build_s_tilde(frames))
        .bind_op("R+", build_r_plus(frames))
        .bind_op("R-", build_r_minus(frames));
    for fam in Family::ALL {
        env.bind_gens(fam.matrix_symbol(), generator_matrix(fam, &fam.frames(frames), n));
        env.add_algebra(Arc::new(Presentation::new(fam, frames, n)?));
    }
    Ok(env)
}

type Work = Box<dyn FnOnce(&Opts) -> Outcome + Send>;

enum Outcome {
    Report(Report),
    Usage(String),
}

fn texpr_check(identity: &str, opts: &Opts) -> Outcome {
    let expr = match parse(identity) {
        Ok(e) => e,
        Err(e) => return Outcome::Usage(e.to_string()),
    };
    let (frames, n) = (opts.r.unwrap_or(1), opts.n.unwrap_or(2));
    let params = [("r", Value::from(frames)), ("n", Value::from(n)), ("ast", ast_json(&expr))];
    let result = texpr_env(frames, n).and_then(|env| check_identity(&expr, &env));
    match result {
        Ok(rep) => Outcome::Report(Report::new(
            "texpr",
            &params,
            vec![Check::from_failure(expr.to_string(), rep.entries as u64, rep.witness)],
        )),
        Err(e @ (crate::Error::Unbound(_) | crate::Error::Arity(_) | crate::Error::Parse { .. })) => {
            Outcome::Usage(e.to_string())
        }
        Err(e) => Outcome::Report(Report::error("texpr", e.to_string())),
    }
}

fn emit(report: &Report, opts: &Opts) -> std::io::Result<()> {
    let mut body = match opts.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &opts.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// Parses `argv` (including the program name), runs the command, returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let (opts, work): (&Opts, Work) = match &cli.command {
        Command::Verify { suite, opts } => {
            let name = suite.name();
            (opts, Box::new(move |o: &Opts| Outcome::Report(run_suite::<Scalar>(name, &o.config()))))
        }
        Command::Texpr { action: TexprCmd::Check { identity, opts } } => {
            let id = identity.clone();
            (opts, Box::new(move |o: &Opts| texpr_check(&id, o)))
        }
    };
    if opts.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    if let Some(msg) = opts.bounds_violation() {
        if !opts.allow_large {
            eprintln!("error: {msg} (use --allow-large to override)");
            return EXIT_USAGE;
        }
        eprintln!("warning: {msg}; runtime may be large");
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("internal error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let start = Instant::now();
    let mut report = match pool.install(|| work(opts)) {
        Outcome::Report(r) => r,
        Outcome::Usage(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    if opts.timing {
        report.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    if let Err(e) = emit(&report, opts) {
        eprintln!("internal error: cannot write report: {e}");
        return EXIT_INTERNAL;
    }
    match report.status {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Error => {
            for w in &report.witnesses {
                eprintln!("internal error in {}: {}", w.check, w.detail);
            }
            EXIT_INTERNAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        assert_eq!(run(["uqqn", "verify", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["uqqn", "verify", "ybe", "--n", "7"]), EXIT_USAGE);
        assert_eq!(run(["uqqn", "texpr", "check", "S^{12 =="]), EXIT_USAGE);
        assert_eq!(run(["uqqn", "texpr", "check", "Q^{12} == S^{12}"]), EXIT_USAGE);
    }

    #[test]
    fn texpr_pass_and_fail() {
        assert_eq!(
            run(["uqqn", "texpr", "check", "S^{12} S^{13} S^{23} == S^{23} S^{13} S^{12}", "--n", "1"]),
            EXIT_PASS
        );
        assert_eq!(run(["uqqn", "texpr", "check", "S^{12} == S^{21}", "--n", "1"]), EXIT_FAIL);
    }

    #[test]
    fn verify_ybe_exit_zero() {
        assert_eq!(run(["uqqn", "verify", "ybe", "--n", "2"]), EXIT_PASS);
    }
}
