//! Structured verification reports shared by the suites and the CLI.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// One named family of checks; `pass` flips on the first failure, whose detail is kept.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Check {
        Check { name: name.into(), pass: true, count: 0, detail: None }
    }

    pub fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.count += 1;
        if !ok && self.pass {
            self.pass = false;
            self.detail = Some(detail());
        }
    }

    pub fn from_failure(name: impl Into<String>, count: u64, failure: Option<String>) -> Check {
        Check { name: name.into(), pass: failure.is_none(), count, detail: failure }
    }

    /// A negative control passes when it finds a counterexample.
    pub fn control(name: impl Into<String>, counterexample: Option<String>) -> Check {
        let pass = counterexample.is_some();
        let detail = match counterexample {
            Some(w) => Some(format!("rejected as expected: {w}")),
            None => Some("no counterexample found".into()),
        };
        Check { name: format!("control: {}", name.into()), pass, count: 1, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    pub checked: u64,
    pub checks: Vec<Check>,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl Report {
    pub fn new(suite: &str, params: &[(&str, Value)], checks: Vec<Check>) -> Report {
        let witnesses: Vec<Witness> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| Witness { check: c.name.clone(), detail: c.detail.clone().unwrap_or_else(|| "failed".into()) })
            .collect();
        Report {
            schema: 1,
            suite: suite.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            status: if witnesses.is_empty() { Status::Pass } else { Status::Fail },
            checked: checks.iter().map(|c| c.count).sum(),
            checks,
            witnesses,
            wall_ms: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// A suite that could not run; carries the diagnostic as its witness.
    pub fn error(suite: &str, msg: String) -> Report {
        let mut r = Report::new(suite, &[], vec![Check::from_failure("suite ran to completion", 1, Some(msg))]);
        r.status = Status::Error;
        r
    }

    /// Merges sub-reports under one suite name; check names get the sub-suite as prefix.
    pub fn combine(suite: &str, parts: Vec<Report>) -> Report {
        let mut params = BTreeMap::new();
        let mut checks = Vec::new();
        let parts_status: Vec<Status> = parts.iter().map(|p| p.status.clone()).collect();
        for p in parts {
            for (k, v) in p.params {
                params.insert(format!("{}.{k}", p.suite), v);
            }
            for mut c in p.checks {
                c.name = format!("{}: {}", p.suite, c.name);
                checks.push(c);
            }
        }
        let errored = parts_status.contains(&Status::Error);
        let mut r = Report::new(suite, &[], checks);
        r.params = params;
        if errored {
            r.status = Status::Error;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} [{}] {} checks, {} entries\n",
            self.suite,
            match self.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            },
            self.checks.len(),
            self.checked
        );
        for c in &self.checks {
            out.push_str(&format!("  {} {} ({})", if c.pass { "✓" } else { "✗" }, c.name, c.count));
            if let Some(d) = &c.detail {
                if !c.pass || c.name.starts_with("control:") {
                    out.push_str(&format!(": {d}"));
                }
            }
            out.push('\n');
        }
        if let Some(ms) = self.wall_ms {
            out.push_str(&format!("  wall time {ms} ms\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_yields_witness() {
        let mut c = Check::new("x");
        c.record(true, || unreachable!());
        c.record(false, || "w".into());
        c.record(false, || "later".into());
        let r = Report::new("s", &[("n", Value::from(1))], vec![c]);
        assert!(!r.pass());
        assert_eq!(r.witnesses[0].detail, "w");
        assert_eq!(r.checked, 3);
    }
}
