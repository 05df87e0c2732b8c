//! Check records and reports, rendered as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub anchor: String,
    pub details: BTreeMap<String, Value>,
    #[serde(skip)]
    pub duration: Duration,
}

impl Record {
    pub fn new(name: impl Into<String>, kind: impl Into<String>, anchor: impl Into<String>) -> Self {
        Record {
            name: name.into(),
            kind: kind.into(),
            status: Status::Pass,
            anchor: anchor.into(),
            details: BTreeMap::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn passed(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }

    /// Marks the record as an error and stores the error kind and message.
    pub fn errored(mut self, e: &Error) -> Self {
        self.status = Status::Error;
        self.details.insert("error".into(), e.kind().into());
        self.details.insert("message".into(), e.to_string().into());
        if let Error::IllDefinedMap { generator, residue } = e {
            self.details.insert("generator".into(), generator.clone().into());
            self.details.insert("residue".into(), residue.clone().into());
        }
        if let Error::IncompatibleFamily { arrow } = e {
            self.details.insert("arrow".into(), arrow.clone().into());
        }
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        match r.status {
            Status::Pass => self.summary.pass += 1,
            Status::Fail => self.summary.fail += 1,
            Status::Error => self.summary.error += 1,
        }
        self.checks.push(r);
    }

    pub fn extend(&mut self, other: Report) {
        for r in other.checks {
            self.push(r);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }

    /// 0 if everything passed, 1 on any failed check, else 2.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if self.summary.error > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.checks {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let _ = write!(out, "{tag:<5} {} [{}] ({})", r.name, r.kind, r.anchor);
            let _ = writeln!(out, " {:.1?}", r.duration);
            for (k, v) in &r.details {
                let _ = writeln!(out, "      {k}: {}", render_value(v));
            }
        }
        let s = self.summary;
        let _ = writeln!(out, "{} passed, {} failed, {} errors", s.pass, s.fail, s.error);
        out
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(render_value).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}
