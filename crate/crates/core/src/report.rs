use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ResolvedWithCorrection,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ResolvedWithCorrection => "resolved-with-correction",
        }
    }

    /// Overall status of a list of checks: fail if any fails, otherwise
    /// resolved-with-correction if any needed one.
    pub fn combine<'a, I: IntoIterator<Item = &'a CheckRecord>>(checks: I) -> Status {
        let mut out = Status::Pass;
        for c in checks {
            match c.status {
                Status::Fail => return Status::Fail,
                Status::ResolvedWithCorrection => out = Status::ResolvedWithCorrection,
                Status::Pass => {}
            }
        }
        out
    }
}

/// One verified identity.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub identity: String,
    pub anchor: String,
    pub status: Status,
    /// Exact residual, or a decimal string for numeric checks.
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl CheckRecord {
    pub fn new(identity: impl Into<String>, anchor: impl Into<String>, ok: bool, residual: impl Into<String>) -> CheckRecord {
        CheckRecord {
            identity: identity.into(),
            anchor: anchor.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: residual.into(),
            detail: None,
            millis: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> CheckRecord {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_status(mut self, status: Status) -> CheckRecord {
        self.status = status;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub precision_bits: u32,
    pub seed: u64,
}

impl Environment {
    pub fn new(precision_bits: u32, seed: u64) -> Environment {
        Environment { version: env!("CARGO_PKG_VERSION"), precision_bits, seed }
    }
}

/// Outcome of one task: echo of the request, overall status and the individual checks.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub task: BTreeMap<String, String>,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub environment: Environment,
}

impl Report {
    pub fn new(task: BTreeMap<String, String>, checks: Vec<CheckRecord>, environment: Environment) -> Report {
        Report { schema: SCHEMA_VERSION, status: Status::combine(&checks), task, checks, environment }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// 0 unless a check failed.
    pub fn exit_code(&self) -> i32 {
        if self.status == Status::Fail {
            1
        } else {
            0
        }
    }

    /// Short human-readable listing.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("[{}] {}  (residual {})\n", c.status.as_str(), c.identity, c.residual));
            if let Some(d) = &c.detail {
                out.push_str(&format!("    {d}\n"));
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!("{}: {} checks, {} failed\n", self.status.as_str(), self.checks.len(), failed));
        out
    }
}
