use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        }
    }
}

/// Where two sides first differ. Trivariate mismatches also name the
/// `a^α x^β` part of the monomial; `exponent` is always the `q` exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MismatchDetail {
    pub exponent: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<i64>,
    /// Matrix entry or vector row (1-based), when the sides are not scalar.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entry: Option<Vec<usize>>,
    pub left: String,
    pub right: String,
}

impl MismatchDetail {
    pub fn describe(&self) -> String {
        let mut s = String::new();
        if let Some(e) = &self.entry {
            let idx: Vec<String> = e.iter().map(usize::to_string).collect();
            let _ = write!(s, "[{}] ", idx.join(","));
        }
        if let (Some(a), Some(x)) = (self.a, self.x) {
            let _ = write!(s, "a^{a} x^{x} ");
        }
        let _ = write!(s, "q^{}: {} != {}", self.exponent, self.left, self.right);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement this check verifies.
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mismatch: Option<MismatchDetail>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    /// Only recorded with `--timings`, so default reports stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub k: [i64; 2],
    pub degree: i64,
    pub shelves: [i64; 2],
    pub start_shelf: [i64; 2],
    pub nmax: i64,
    pub nmax_over: i64,
    pub q_prec: i64,
}

impl From<&Config> for Parameters {
    fn from(c: &Config) -> Self {
        Parameters {
            k: [*c.k.start(), *c.k.end()],
            degree: c.degree,
            shelves: [*c.shelves.start(), *c.shelves.end()],
            start_shelf: [*c.start.start(), *c.start.end()],
            nmax: c.nmax,
            nmax_over: c.nmax_over,
            q_prec: c.q_prec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: Parameters,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(suite: &str, config: &Config, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        VerificationReport { suite: suite.to_string(), parameters: config.into(), checks, summary }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn find(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.parameters;
        let _ = writeln!(
            s,
            "suite {}  k={}..{} N={} shelves={}..{} J={}..{} nmax={} nmax_over={} q_prec={}",
            self.suite,
            p.k[0],
            p.k[1],
            p.degree,
            p.shelves[0],
            p.shelves[1],
            p.start_shelf[0],
            p.start_shelf[1],
            p.nmax,
            p.nmax_over,
            p.q_prec
        );
        for c in &self.checks {
            let _ = write!(s, "{:<7} {}  [{}]", c.status.label(), c.id, c.anchor);
            if let Some(ms) = c.wall_ms {
                let _ = write!(s, "  {ms} ms");
            }
            s.push('\n');
            if let Some(m) = &c.mismatch {
                let _ = writeln!(s, "        first mismatch {}", m.describe());
            }
            if let Some(d) = &c.detail {
                let _ = writeln!(s, "        {d}");
            }
        }
        let _ = writeln!(
            s,
            "{} passed, {} failed, {} skipped",
            self.summary.pass, self.summary.fail, self.summary.skipped
        );
        s
    }
}
