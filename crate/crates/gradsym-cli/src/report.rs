//! Verification reports: a fixed-width table for people and a JSON document described by
//! `report.schema.json`.

use gradsym::check::Check;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SCHEMA_ID: &str = "gradsym-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub stage: String,
    pub check: String,
    pub anchor: String,
    pub status: Status,
    pub residual: String,
    pub ms: u64,
}

impl Row {
    pub fn from_check(stage: &str, c: Check, ms: u64) -> Row {
        let status = if c.pass { Status::Pass } else { Status::Fail };
        Row { stage: stage.into(), check: c.name, anchor: c.anchor, status, residual: c.residual, ms }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub target: String,
    pub seed: u64,
    pub max_degree: u32,
    pub stages: Vec<String>,
    pub summary: Summary,
    pub checks: Vec<Row>,
    #[serde(skip)]
    pub timings: bool,
}

impl Report {
    pub fn new(target: String, seed: u64, max_degree: u32, stages: Vec<String>, timings: bool) -> Report {
        Report { schema: SCHEMA_ID, target, seed, max_degree, stages, summary: Summary::default(), checks: Vec::new(), timings }
    }

    pub fn push(&mut self, row: Row) {
        match row.status {
            Status::Pass => self.summary.pass += 1,
            Status::Fail => self.summary.fail += 1,
            Status::Skip => self.summary.skip += 1,
        }
        self.checks.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0 && self.summary.skip == 0
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    /// Structured document. Wall times are written as 0 unless timings were requested, so
    /// equal specs and seeds give identical bytes.
    pub fn to_json(&self) -> String {
        let mut r = self.clone();
        if !self.timings {
            r.checks.iter_mut().for_each(|c| c.ms = 0);
        }
        serde_json::to_string_pretty(&r).expect("report serialises") + "\n"
    }

    pub fn to_table(&self) -> String {
        let w_stage = self.checks.iter().map(|r| r.stage.len()).max().unwrap_or(5).max(5);
        let w_check = self.checks.iter().map(|r| r.check.chars().count()).max().unwrap_or(5).clamp(5, 60);
        let w_anchor = self.checks.iter().map(|r| r.anchor.len()).max().unwrap_or(6).max(6);
        let mut s = String::new();
        let _ = writeln!(s, "target {}  seed {}  max_degree {}", self.target, self.seed, self.max_degree);
        let _ = writeln!(s, "{:<6} {:<w_stage$} {:<w_check$} {:<w_anchor$} {:>7}  residual", "status", "stage", "check", "anchor", "ms");
        for r in &self.checks {
            let check: String = r.check.chars().take(w_check).collect();
            let residual: String = r.residual.chars().take(100).collect();
            let _ = writeln!(s, "{:<6} {:<w_stage$} {:<w_check$} {:<w_anchor$} {:>7}  {}", r.status.as_str(), r.stage, check, r.anchor, r.ms, residual);
        }
        let _ = writeln!(s, "{} passed, {} failed, {} skipped", self.summary.pass, self.summary.fail, self.summary.skip);
        s
    }
}

/// Path of the table written next to a structured report.
pub fn table_path(path: &Path) -> PathBuf {
    path.with_extension("txt")
}

/// Writes the structured report to `path` and the table to `path` with extension `txt`.
pub fn emit_report(r: &Report, path: &Path) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, r.to_json())?;
    std::fs::write(table_path(path), r.to_table())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::new("abelian".into(), 0, 4, vec![], false);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
        assert_eq!(v["schema"], SCHEMA_ID);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn failing_row_sets_exit_code() {
        let mut r = Report::new("abelian".into(), 0, 4, vec!["validate".into()], false);
        r.push(Row::from_check("validate", Check::new("x = 0", "k", false, "x"), 3));
        assert_eq!(r.exit_code(), 1);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let row = &v["checks"][0];
        for key in ["check", "anchor", "status", "residual", "ms"] {
            assert!(row.get(key).is_some(), "{}", key);
        }
        assert_eq!(row["status"], "fail");
        assert_eq!(row["ms"], 0);
        assert!(!row["residual"].as_str().unwrap().is_empty());
    }
}
