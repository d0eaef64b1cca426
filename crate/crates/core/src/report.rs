//! Machine-readable check reports shared by the command-line front end.

use std::thread;
use std::time::Instant;

use serde_json::{json, Value};

use crate::Error;

pub const SCHEMA: &str = "moperad-kit/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub details: Value,
    pub timing_ms: f64,
}

/// A check body returns whether it passed and what to report.
pub type CheckFn<'a> = Box<dyn FnOnce() -> Result<(bool, Value), Error> + Send + 'a>;

impl Check {
    pub fn run(id: &str, f: CheckFn<'_>) -> Check {
        let start = Instant::now();
        let (status, details) = match f() {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e) => (Status::Error, json!({ "error": e.to_string() })),
        };
        Check { id: id.into(), status, details, timing_ms: start.elapsed().as_secs_f64() * 1e3 }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "status": self.status.as_str(),
            "details": self.details,
            "timing_ms": (self.timing_ms * 1e3).round() / 1e3,
        })
    }
}

/// Runs checks on scoped worker threads; the result keeps the input order.
pub fn run_checks(jobs: Vec<(String, CheckFn<'_>)>) -> Vec<Check> {
    thread::scope(|s| {
        let handles: Vec<_> = jobs.into_iter().map(|(id, f)| s.spawn(move || Check::run(&id, f))).collect();
        handles.into_iter().map(|h| h.join().expect("check worker panicked")).collect()
    })
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report { command, checks: Vec::new() }
    }

    pub fn extend(&mut self, checks: Vec<Check>) {
        self.checks.extend(checks);
    }

    fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(!self.all_pass())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "summary": {
                "total": self.checks.len(),
                "pass": self.count(Status::Pass),
                "fail": self.count(Status::Fail),
                "error": self.count(Status::Error),
            },
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("$ {}\n", self.command.join(" "));
        for c in &self.checks {
            out.push_str(&format!("{:<5} {} ({:.1} ms)\n", c.status.as_str().to_uppercase(), c.id, c.timing_ms));
            if c.status != Status::Pass {
                out.push_str(&format!("      {}\n", c.details));
            }
        }
        out.push_str(&format!(
            "{} checks: {} pass, {} fail, {} error\n",
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_exit_code() {
        let jobs: Vec<(String, CheckFn<'_>)> = vec![
            ("a".into(), Box::new(|| Ok((true, json!(1))))),
            ("b".into(), Box::new(|| Ok((false, json!(2))))),
            ("c".into(), Box::new(|| Err(Error::Invalid("boom".into())))),
        ];
        let mut r = Report::new(vec!["x".into()]);
        r.extend(run_checks(jobs));
        let ids: Vec<&str> = r.checks.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(r.exit_code(), 1);
        let v = r.to_json();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["summary"]["error"], 1);
        assert_eq!(v["checks"][2]["status"], "error");
    }
}
