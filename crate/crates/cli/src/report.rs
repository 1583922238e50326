//! Check reports and their text and JSON renderings. Both renderings are
//! deterministic: fields are keyed in sorted order and every value is a
//! string or a list of strings.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// A verdict that holds.
    Pass,
    /// A verdict that fails.
    Fail,
    /// A computation without a verdict.
    Ok,
    Error,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Ok => "ok",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Field {
    Text(String),
    List(Vec<String>),
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Text(b.to_string())
    }
}

impl From<Vec<String>> for Field {
    fn from(v: Vec<String>) -> Self {
        Field::List(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessOut {
    pub source: String,
    pub target: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub index: usize,
    pub line: usize,
    pub kind: String,
    pub args: Vec<String>,
    pub status: Status,
    pub values: BTreeMap<String, Field>,
    pub witnesses: Vec<WitnessOut>,
    pub error: Option<String>,
}

impl CheckReport {
    pub fn value(&self, key: &str) -> Option<&Field> {
        self.values.get(key)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(Field::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self, key: &str) -> Option<&[String]> {
        match self.values.get(key) {
            Some(Field::List(v)) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub ok: usize,
    pub error: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl Report {
    pub fn push(&mut self, c: CheckReport) {
        match c.status {
            Status::Pass => self.summary.pass += 1,
            Status::Fail => self.summary.fail += 1,
            Status::Ok => self.summary.ok += 1,
            Status::Error => self.summary.error += 1,
        }
        self.checks.push(c);
    }

    /// 0 when nothing failed, 1 on a failed verdict, 2 on any error.
    pub fn exit_code(&self) -> i32 {
        if self.summary.error > 0 {
            2
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mut head = format!("[{}] line {}: {}", c.index, c.line, c.kind);
            for a in &c.args {
                write!(head, " {a}").unwrap();
            }
            writeln!(out, "{head} ... {}", c.status.name()).unwrap();
            for (k, v) in &c.values {
                match v {
                    Field::Text(s) => writeln!(out, "    {k}: {s}").unwrap(),
                    Field::List(items) if items.is_empty() => writeln!(out, "    {k}: []").unwrap(),
                    Field::List(items) => {
                        writeln!(out, "    {k}:").unwrap();
                        for i in items {
                            writeln!(out, "      - {i}").unwrap();
                        }
                    }
                }
            }
            for w in &c.witnesses {
                writeln!(out, "    witness ({}, {}): {} < {}", w.source, w.target, w.lhs, w.rhs).unwrap();
            }
            if let Some(e) = &c.error {
                writeln!(out, "    error: {e}").unwrap();
            }
        }
        let s = &self.summary;
        writeln!(out, "summary: {} pass, {} fail, {} ok, {} error", s.pass, s.fail, s.ok, s.error).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        let r = Report::default();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.to_text(), "summary: 0 pass, 0 fail, 0 ok, 0 error\n");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn exit_codes() {
        let mut r = Report::default();
        let c = CheckReport {
            index: 1,
            line: 1,
            kind: "compare".into(),
            args: vec![],
            status: Status::Fail,
            values: BTreeMap::new(),
            witnesses: vec![],
            error: None,
        };
        r.push(c.clone());
        assert_eq!(r.exit_code(), 1);
        r.push(CheckReport { status: Status::Error, ..c });
        assert_eq!(r.exit_code(), 2);
    }
}
