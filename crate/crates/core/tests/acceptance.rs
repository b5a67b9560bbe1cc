//! Acceptance suite: one line per criterion with its runtime against the budget.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use uqqn::suites::{run_suite, SuiteConfig};
use uqqn::Scalar;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, u64, Box<dyn Fn() -> Outcome>);

fn suite(name: &str) -> Outcome {
    let r = run_suite::<Scalar>(name, &SuiteConfig::default());
    let failed: Vec<String> = r.witnesses.iter().map(|w| format!("{}: {}", w.check, w.detail)).collect();
    Outcome {
        pass: r.pass(),
        detail: if failed.is_empty() {
            format!("{} checks, {} entries", r.checks.len(), r.checked)
        } else {
            failed.join("; ")
        },
    }
}

fn verify_all_json(extra: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_uqqn"))
        .args(["verify", "all", "--format", "json"])
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs = [verify_all_json(&[]), verify_all_json(&[]), verify_all_json(&["--jobs", "4"])];
    match runs {
        [Ok(a), Ok(b), Ok(c)] => Outcome {
            pass: a == b && b == c,
            detail: format!("{} bytes; repeat identical: {}; --jobs 4 identical: {}", a.len(), a == b, a == c),
        },
        [a, b, c] => Outcome {
            pass: false,
            detail: [a, b, c].into_iter().filter_map(Result::err).collect::<Vec<_>>().join("; "),
        },
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "Yang-Baxter equation, inverse, S_J and S~ forms", 10, Box::new(|| suite("ybe"))),
        (2, "presentations: matrix relations, PBW dimensions, confluence", 120, Box::new(|| suite("presentation"))),
        (3, "dual-presentation lemma at (s,n) = (2,2)", 60, Box::new(|| suite("dual-lemma"))),
        (4, "actions: well-defined, super-commuting, classical limit", 120, Box::new(|| suite("action"))),
        (5, "braidings: hexagons, relations, module map", 180, Box::new(|| suite("braiding"))),
        (6, "isomorphisms sigma, sigma-bar, tau, tau-bar, associativity", 180, Box::new(|| suite("iso"))),
        (7, "invariants x, y, z, w and negative controls", 180, Box::new(|| suite("invariants"))),
        (8, "determinism of `verify all` JSON", 600, Box::new(determinism)),
    ];
    let mut all = true;
    for (id, name, budget, run) in criteria.iter() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.pass && took <= Duration::from_secs(*budget);
        all &= ok;
        println!(
            "criterion {id} [{}] {name} ({:.2}s / {budget}s): {}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
