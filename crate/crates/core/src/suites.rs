//! Verification suites, one per acceptance area, producing [`Report`]s.

use std::sync::Arc;

use rayon::prelude::*;
use serde_json::Value;

use crate::actions::{
    check_supercommute, check_well_defined, corrupted_table_witness, counit, derive_action, ActionKind,
};
use crate::braidiso::{
    assoc_check, check_hexagons, check_iso_intertwining, check_kills_relations, check_sigma, check_theta_module_hom,
    tau, tau_bar, tau_bar_inv, tau_bar_literal, tau_bar_literal_inv, tau_inv, Braiding,
};
use crate::error::Result;
use crate::invariants::invariant_checks;
use crate::presentations::{
    api_generator_relation_witness, check_presentation_equivalence_dual, dual_flipped_theta_witness, relation_env,
    Elem, Family, Presentation,
};
use crate::qscalar::QField;
use crate::report::{Check, Report};
use crate::supertensor::{
    build_r_minus_transposed, build_s, build_s_inv, build_s_j, build_s_tilde, check_ybe_plain, conjugate_s_by_d,
    conjugate_s_by_j, ybe_witness, TensorOperator,
};
use crate::texpr::{check_identity, parse, Env};

pub const DEFAULT_SEED: u64 = 20_241_015;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub l: Option<usize>,
    pub max_degree: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { n: None, r: None, k: None, s: None, l: None, max_degree: 4, trials: 1000, seed: DEFAULT_SEED }
    }
}

impl SuiteConfig {
    fn params(&self) -> Vec<(&'static str, Value)> {
        let mut v: Vec<(&str, Value)> = Vec::new();
        for (name, x) in [("n", self.n), ("r", self.r), ("k", self.k), ("s", self.s), ("l", self.l)] {
            if let Some(x) = x {
                v.push((name, Value::from(x)));
            }
        }
        v.push(("max_degree", Value::from(self.max_degree)));
        v.push(("trials", Value::from(self.trials)));
        v.push(("seed", Value::from(self.seed)));
        v
    }
}

pub const SUITES: [&str; 7] = ["ybe", "presentation", "dual-lemma", "action", "braiding", "iso", "invariants"];

fn grid<T: Sync>(
    items: &[T],
    label: impl Fn(&T) -> String + Sync,
    f: impl Fn(&T) -> Result<Vec<Check>> + Sync,
) -> Result<Vec<Check>> {
    let parts: Vec<Result<Vec<Check>>> = items.par_iter().map(&f).collect();
    let mut out = Vec::new();
    for (item, part) in items.iter().zip(parts) {
        let tag = label(item);
        for mut c in part? {
            c.name = format!("[{tag}] {}", c.name);
            out.push(c);
        }
    }
    Ok(out)
}

fn op_check<K: QField>(name: &str, a: &TensorOperator<K>, b: &TensorOperator<K>) -> Check {
    let diff = a.first_difference(b);
    Check::from_failure(name, 1, diff.map(|(key, x, y)| format!("entry {key:?}: {x} vs {y}")))
}

fn ybe_checks<K: QField>(n: usize) -> Result<Vec<Check>> {
    let s = build_s::<K>(n);
    let mut out = Vec::new();
    let w = ybe_witness(&s)?;
    out.push(Check::from_failure(
        "S12 S13 S23 = S23 S13 S12",
        1,
        w.map(|(key, x, y)| format!("entry {key:?}: {x} vs {y}")),
    ));
    let mut env = Env::<K>::new();
    env.bind_op("S", s.clone());
    let rep = check_identity(&parse("S^{12} S^{13} S^{23} == S^{23} S^{13} S^{12}")?, &env)?;
    out.push(Check::from_failure(
        "the same identity through the leg-expression evaluator",
        rep.entries as u64,
        rep.witness,
    ));
    let prod = s.op_mul(&build_s_inv::<K>(n))?;
    out.push(op_check("S S^-1 = 1", &prod, &TensorOperator::identity(vec![n, n])));
    out.push(op_check("explicit S_J = (1 (x) J) S (1 (x) J)", &build_s_j::<K>(n), &conjugate_s_by_j::<K>(n)));
    out.push(op_check("explicit S~ = (1 (x) D) S (1 (x) D^-1)", &build_s_tilde::<K>(n), &conjugate_s_by_d::<K>(n)));
    out.push(Check::control(
        "Yang-Baxter without Koszul signs in leg composition",
        (!check_ybe_plain(&s)).then(|| "sign-free products differ".to_string()),
    ));
    let mut bad = s.clone();
    bad.add_entry(vec![(1, 1), (-1, 1)], K::one());
    out.push(Check::control(
        "S + E_11 (x) E_-1,1 fails Yang-Baxter",
        ybe_witness(&bad)?.map(|(key, x, y)| format!("entry {key:?}: {x} vs {y}")),
    ));
    Ok(out)
}

pub fn ybe<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let ns: Vec<usize> = match cfg.n {
        Some(n) => vec![n],
        None => vec![1, 2, 3],
    };
    let checks = grid(&ns, |n| format!("n={n}"), |&n| ybe_checks::<K>(n))?;
    Ok(Report::new("ybe", &cfg.params(), checks))
}

fn presentation_checks<K: QField>(frames: usize, n: usize, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for fam in Family::ALL {
        let p = Arc::new(Presentation::<K>::new(fam, frames, n)?);
        let name = fam.name();
        let mut env = relation_env::<K>(fam, frames, n);
        env.add_algebra(p.clone());
        let rep = check_identity(&parse(fam.relation())?, &env)?;
        out.push(Check::from_failure(
            format!("{name}: matrix relation holds in normal form"),
            rep.entries as u64,
            rep.witness,
        ));
        out.push(Check::from_failure(
            format!("{name}: leading words are the out-of-order pairs and odd squares"),
            p.rule_count() as u64,
            (!p.leads_are_standard()).then(|| "lead set differs".to_string()),
        ));
        out.push(Check::from_failure(format!("{name}: all overlaps resolve"), 1, p.overlap_failure()));
        let mut pbw = Check::new(format!("{name}: PBW dimensions up to degree {}", cfg.max_degree));
        for d in 0..=cfg.max_degree {
            let r = p.pbw_check(d);
            pbw.record(r.ok(), || {
                format!(
                    "degree {d}: rank {} vs dim_component {}; {}",
                    r.rank,
                    r.dim,
                    r.witness.clone().unwrap_or_default()
                )
            });
        }
        out.push(pbw);
        let probe = p.confluence_probe(cfg.trials, 5, cfg.seed);
        out.push(Check::from_failure(
            format!("{name}: randomised reduction strategies agree"),
            probe.trials as u64,
            probe.failure,
        ));
    }
    let p = Presentation::<K>::new(Family::A, frames, n)?;
    let lead = p.gens().windows(2).map(|w| (w[1], w[0])).find(|l| p.with_misoriented_rule(*l).is_some());
    let witness = lead
        .and_then(|l| p.with_misoriented_rule(l))
        .and_then(|bad| bad.confluence_probe(cfg.trials, 5, cfg.seed).failure);
    out.push(Check::control("a mis-oriented rule is caught by the probe", witness));
    out.push(Check::from_failure(
        "APi: generator form with Koszul sign (-1)^{(|a|+1)(|b|+1)} holds",
        (frames * frames * 4 * n * n) as u64,
        api_generator_relation_witness::<K>(frames, n, true)?,
    ));
    out.push(Check::control(
        "APi: generator form with sign (-1)^{|a||b|} fails",
        api_generator_relation_witness::<K>(frames, n, false)?,
    ));
    if frames >= 2 {
        let fam = Family::Bar;
        let mut env = relation_env::<K>(fam, frames, n);
        env.bind_op("R-", build_r_minus_transposed(frames));
        env.add_algebra(Arc::new(Presentation::<K>::new(fam, frames, n)?));
        let rep = check_identity(&parse(fam.relation())?, &env)?;
        out.push(Check::control("Abar: relation with the transposed R- fails", rep.witness));
    }
    Ok(out)
}

pub fn presentation<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let pts: Vec<(usize, usize)> = match (cfg.r, cfg.n) {
        (None, None) => vec![(1, 1), (1, 2), (2, 1), (2, 2)],
        (r, n) => vec![(r.unwrap_or(1), n.unwrap_or(1))],
    };
    let checks = grid(&pts, |(f, n)| format!("frames={f} n={n}"), |&(f, n)| presentation_checks::<K>(f, n, cfg))?;
    Ok(Report::new("presentation", &cfg.params(), checks))
}

pub fn dual_lemma<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let (s, n) = (cfg.s.unwrap_or(2), cfg.n.unwrap_or(2));
    let mut checks = check_presentation_equivalence_dual::<K>(s, n)?;
    checks
        .push(Check::control("the general relation with theta negated fails", dual_flipped_theta_witness::<K>(s, n)?));
    Ok(Report::new("dual-lemma", &cfg.params(), checks))
}

fn action_checks<K: QField>(frames: usize, n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut algs = Vec::new();
    for fam in Family::ALL {
        algs.push(Arc::new(Presentation::<K>::new(fam, frames, n)?));
    }
    let alg = |f: Family| algs[Family::ALL.iter().position(|x| *x == f).expect("family")].clone();
    let mut tables = Vec::new();
    for kind in ActionKind::ALL {
        let t = derive_action(kind, alg(kind.family()))?;
        out.push(check_well_defined(&t));
        let mut cu = Check::new(format!("{}: L_ab . 1 = eps(L_ab) 1", kind.name()));
        for (a, b) in t.pairs() {
            let v = t.apply(a, b, &Elem::one())?;
            cu.record(v == Elem::one().scale(&counit(a, b)), || format!("L[{a},{b}] . 1 = {v}"));
        }
        out.push(cu);
        tables.push(t);
    }
    if frames + n <= 4 {
        out.push(check_supercommute(&tables[4], &tables[0])?);
        out.push(check_supercommute(&tables[5], &tables[2])?);
    }
    out.push(Check::control(
        "phi with one table entry negated is not well defined",
        corrupted_table_witness(&tables[0]),
    ));
    Ok(out)
}

fn classical_limit(frames: usize, n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for fam in Family::ALL {
        let p = Presentation::<crate::qscalar::Scalar>::new(fam, frames, n)?;
        out.push(Check::from_failure(
            format!("{}: rules at q = 1 are super-commutativity", fam.name()),
            p.rule_count() as u64,
            p.classical_limit_failure(),
        ));
    }
    Ok(out)
}

pub fn action<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let pts: Vec<(usize, usize)> = match (cfg.r, cfg.n) {
        (None, None) => vec![(1, 1), (1, 2), (2, 1), (2, 2)],
        (r, n) => vec![(r.unwrap_or(1), n.unwrap_or(1))],
    };
    let mut checks = grid(&pts, |(f, n)| format!("frames={f} n={n}"), |&(f, n)| action_checks::<K>(f, n))?;
    checks.extend(grid(&pts, |(f, n)| format!("frames={f} n={n}"), |&(f, n)| classical_limit(f, n))?);
    Ok(Report::new("action", &cfg.params(), checks))
}

fn braiding_checks<K: QField>(r: usize, k: usize, n: usize, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let a_k = Arc::new(Presentation::<K>::new(Family::A, k, n)?);
    let a_r = Arc::new(Presentation::<K>::new(Family::A, r, n)?);
    let b_l = Arc::new(Presentation::<K>::new(Family::Bar, k, n)?);
    let b_s = Arc::new(Presentation::<K>::new(Family::Bar, r, n)?);
    let api_k = Arc::new(Presentation::<K>::new(Family::APi, k, n)?);
    let th = Braiding::theta(a_k, a_r)?;
    let tb = Braiding::theta_bar(b_l, b_s)?;
    let tp = th.transported("theta_pi", api_k, tau::<K>, tau_inv::<K>);
    let mut out = Vec::new();
    for b in [&th, &tb, &tp] {
        out.extend(check_hexagons(b, 50, cfg.seed));
        out.push(check_kills_relations(b));
    }
    Ok(out)
}

pub fn braiding<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let custom = cfg.r.is_some() || cfg.k.is_some() || cfg.n.is_some();
    let (r, k, n) = (cfg.r.unwrap_or(2), cfg.k.unwrap_or(2), cfg.n.unwrap_or(2));
    let mut checks =
        grid(&[(r, k, n)], |(r, k, n)| format!("r={r} k={k} n={n}"), |&(r, k, n)| braiding_checks::<K>(r, k, n, cfg))?;
    let hom = if custom { (r, k, n) } else { (1, 1, 2) };
    checks.extend(grid(
        &[hom],
        |(r, k, n)| format!("r={r} k={k} n={n}"),
        |&(r, k, n)| check_theta_module_hom::<K>(r, k, n),
    )?);
    Ok(Report::new("braiding", &cfg.params(), checks))
}

fn tau_checks<K: QField>(frames: usize, n: usize) -> Result<Vec<Check>> {
    let pres = |f: Family| Presentation::<K>::new(f, frames, n).map(Arc::new);
    let mut out = check_iso_intertwining(
        "tau",
        pres(Family::APi)?,
        pres(Family::A)?,
        tau::<K>,
        tau_inv::<K>,
        ActionKind::PhiPi,
        ActionKind::Phi,
    )?;
    out.extend(check_iso_intertwining(
        "tau_bar",
        pres(Family::BarPi)?,
        pres(Family::Bar)?,
        tau_bar::<K>,
        tau_bar_inv::<K>,
        ActionKind::PhiBarPi,
        ActionKind::PhiBar,
    )?);
    let literal = check_iso_intertwining(
        "tau_bar (entrywise sign)",
        pres(Family::BarPi)?,
        pres(Family::Bar)?,
        tau_bar_literal::<K>,
        tau_bar_literal_inv::<K>,
        ActionKind::PhiBarPi,
        ActionKind::PhiBar,
    )?;
    let tw = literal.last().expect("intertwining check");
    out.push(Check::control(
        "tau_bar with the entrywise sign does not intertwine",
        (!tw.pass).then(|| tw.detail.clone().unwrap_or_default()),
    ));
    Ok(out)
}

pub fn iso<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let deg = cfg.max_degree.min(3);
    let pts: Vec<(usize, usize, usize)> = match (cfg.r, cfg.k, cfg.n) {
        (None, None, None) => vec![(1, 1, 1), (1, 1, 2), (2, 1, 1)],
        (r, k, n) => vec![(r.unwrap_or(1), k.unwrap_or(1), n.unwrap_or(1))],
    };
    let sig: Vec<(usize, usize, usize, bool)> =
        pts.iter().flat_map(|&(r, k, n)| [(r, k, n, false), (r, k, n, true)]).collect();
    let mut checks = grid(
        &sig,
        |(r, k, n, bar)| if *bar { format!("s={r} l={k} n={n}") } else { format!("r={r} k={k} n={n}") },
        |&(r, k, n, bar)| check_sigma::<K>(r, k, n, bar, deg),
    )?;
    let tau_pts: Vec<(usize, usize)> = match (cfg.k, cfg.n) {
        (None, None) => vec![(2, 1), (2, 2)],
        (k, n) => vec![(k.unwrap_or(2), n.unwrap_or(1))],
    };
    checks.extend(grid(&tau_pts, |(f, n)| format!("frames={f} n={n}"), |&(f, n)| tau_checks::<K>(f, n))?);
    let n_assoc = cfg.n.unwrap_or(1);
    checks.extend(grid(&[n_assoc], |n| format!("r=k=p=1 n={n}"), |&n| assoc_check::<K>(1, 1, 1, n, deg))?);
    Ok(Report::new("iso", &cfg.params(), checks))
}

pub fn invariants<K: QField>(cfg: &SuiteConfig) -> Result<Report> {
    let custom = [cfg.n, cfg.r, cfg.k, cfg.s, cfg.l].iter().any(|x| x.is_some());
    let pts: Vec<([usize; 5], &str)> = if custom {
        vec![(
            [cfg.n.unwrap_or(1), cfg.r.unwrap_or(1), cfg.k.unwrap_or(1), cfg.s.unwrap_or(1), cfg.l.unwrap_or(1)],
            "xyzw",
        )]
    } else {
        vec![([1, 1, 1, 1, 1], "xyzw"), ([2, 1, 1, 1, 1], "xyzw"), ([2, 2, 1, 1, 1], "xz")]
    };
    let checks = grid(
        &pts,
        |([n, r, k, s, l], _)| format!("n={n} r={r} k={k} s={s} l={l}"),
        |([n, r, k, s, l], fams)| {
            let fams: Vec<char> = fams.chars().collect();
            invariant_checks::<K>(*n, *r, *k, *s, *l, &fams, cfg.seed)
        },
    )?;
    Ok(Report::new("invariants", &cfg.params(), checks))
}

/// Runs one suite by name; errors become `error` reports.
pub fn run_suite<K: QField>(name: &str, cfg: &SuiteConfig) -> Report {
    let r = match name {
        "ybe" => ybe::<K>(cfg),
        "presentation" => presentation::<K>(cfg),
        "dual-lemma" => dual_lemma::<K>(cfg),
        "action" => action::<K>(cfg),
        "braiding" => braiding::<K>(cfg),
        "iso" => iso::<K>(cfg),
        "invariants" => invariants::<K>(cfg),
        "all" => return all::<K>(cfg),
        other => return Report::error(other, format!("unknown suite {other}")),
    };
    r.unwrap_or_else(|e| Report::error(name, e.to_string()))
}

pub fn all<K: QField>(cfg: &SuiteConfig) -> Report {
    let parts: Vec<Report> = SUITES.par_iter().map(|s| run_suite::<K>(s, cfg)).collect();
    Report::combine("all", parts)
}
