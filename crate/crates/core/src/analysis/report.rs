use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rate::RateFit;
use crate::sampling::RngStream;

/// How far a reported number can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Uncertainty {
    /// Monte Carlo standard error.
    Stderr(f64),
    /// Acceptance tolerance the value is compared with.
    Tolerance(f64),
    /// Counts and closed-form constants.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub value: f64,
    pub uncertainty: Uncertainty,
}

impl Statistic {
    pub fn stderr(value: f64, se: f64) -> Self {
        Statistic { value, uncertainty: Uncertainty::Stderr(se) }
    }

    pub fn tolerance(value: f64, tol: f64) -> Self {
        Statistic { value, uncertainty: Uncertainty::Tolerance(tol) }
    }

    pub fn exact(value: f64) -> Self {
        Statistic { value, uncertainty: Uncertainty::Exact }
    }
}

/// One tabulated comparison: an estimate against its bound or target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub n: usize,
    pub q: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound_or_target: f64,
    pub pass: bool,
    pub reps: usize,
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub pass: bool,
    pub statistics: BTreeMap<String, Statistic>,
    pub rows: Vec<ReportRow>,
    pub fits: Vec<RateFit>,
    pub seed: RngStream,
    pub runtime_secs: f64,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check_name: impl Into<String>, seed: RngStream) -> Self {
        CheckReport {
            check_name: check_name.into(),
            pass: true,
            statistics: BTreeMap::new(),
            rows: Vec::new(),
            fits: Vec::new(),
            seed,
            runtime_secs: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn stat(&mut self, key: impl Into<String>, s: Statistic) -> &mut Self {
        self.statistics.insert(key.into(), s);
        self
    }

    /// Appends a row; a failing row fails the report.
    pub fn row(&mut self, row: ReportRow) -> &mut Self {
        self.pass &= row.pass;
        self.rows.push(row);
        self
    }

    pub fn require(&mut self, ok: bool) -> &mut Self {
        self.pass &= ok;
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    /// The first failing row, if any.
    pub fn first_failure(&self) -> Option<&ReportRow> {
        self.rows.iter().find(|r| !r.pass)
    }
}
