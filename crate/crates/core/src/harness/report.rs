//! Plain-text evaluation report plus its machine-readable twin.
//!
//! Sections: the per-case table (ID, objective, actions, expected, status),
//! the execution summary, corpus-wide Accuracy / Error, and the incident
//! log with one row per case that did not pass.

use std::fmt::Write as _;

use serde::Serialize;

use crate::types::{severity_of, AlertSeverity};

use super::eval::{ConfusionMatrix, Mismatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseStatus {
    Pass,
    Fail,
    NotExecuted,
}

impl CaseStatus {
    pub fn label(self) -> &'static str {
        match self {
            CaseStatus::Pass => "Pass",
            CaseStatus::Fail => "Fail",
            CaseStatus::NotExecuted => "Not executed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub id: String,
    pub name: String,
    pub objective: String,
    /// Short description of the inputs, e.g. `14 events: auth, gas, ignition`.
    pub actions: String,
    pub expected: String,
    pub status: CaseStatus,
    pub cm: ConfusionMatrix,
    pub mismatches: Vec<Mismatch>,
    /// Why the case could not be executed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub executed: usize,
    pub passed: usize,
    pub failed: usize,
    pub not_executed: usize,
    pub executed_pct: f64,
    pub successful_pct: f64,
    pub failed_pct: f64,
    pub not_executed_pct: f64,
    pub cm: ConfusionMatrix,
    pub accuracy_pct: Option<f64>,
    pub error_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Incident {
    pub no: usize,
    pub description: String,
    pub case_ref: String,
    /// 1 is the most severe.
    pub severity: u8,
    pub priority: AlertSeverity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
    pub incidents: Vec<Incident>,
}

fn pct(n: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        n as f64 / total as f64 * 100.0
    }
}

/// Whole numbers print bare (`100%`), anything else to two decimals.
pub fn format_pct(v: f64) -> String {
    let rounded = (v * 100.0).round() / 100.0;
    if rounded.fract() == 0.0 {
        format!("{rounded:.0}%")
    } else {
        format!("{rounded:.2}%")
    }
}

impl Report {
    pub fn build(cases: Vec<CaseResult>) -> Report {
        let total = cases.len();
        let count = |s: CaseStatus| cases.iter().filter(|c| c.status == s).count();
        let passed = count(CaseStatus::Pass);
        let failed = count(CaseStatus::Fail);
        let not_executed = count(CaseStatus::NotExecuted);
        let executed = passed + failed;
        let mut cm = ConfusionMatrix::default();
        for c in cases.iter().filter(|c| c.status != CaseStatus::NotExecuted) {
            cm += c.cm;
        }
        let summary = Summary {
            total,
            executed,
            passed,
            failed,
            not_executed,
            executed_pct: pct(executed, total),
            successful_pct: pct(passed, total),
            failed_pct: pct(failed, total),
            not_executed_pct: pct(not_executed, total),
            cm,
            accuracy_pct: cm.accuracy().ok(),
            error_pct: cm.error().ok(),
        };

        let incidents = cases
            .iter()
            .filter(|c| c.status != CaseStatus::Pass)
            .enumerate()
            .map(|(i, c)| {
                let (description, priority) = match &c.error {
                    Some(e) => (format!("not executed: {e}"), AlertSeverity::High),
                    None => (
                        c.mismatches.iter().map(Mismatch::describe).collect::<Vec<_>>().join("; "),
                        c.mismatches
                            .iter()
                            .map(|m| severity_of(m.kind()))
                            .max()
                            .unwrap_or(AlertSeverity::Low),
                    ),
                };
                Incident {
                    no: i + 1,
                    description,
                    case_ref: c.id.clone(),
                    severity: priority.class(),
                    priority,
                }
            })
            .collect();

        Report {
            cases,
            summary,
            incidents,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.total > 0 && self.summary.passed == self.summary.total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |out: &mut String, cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "| {} |", padded.join(" | "));
    };
    line(out, header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "|-{}-|", rule.join("-|-"));
    for row in rows {
        line(out, row.iter().map(String::as_str).collect());
    }
}

pub fn render_report(report: &Report) -> String {
    let s = &report.summary;
    let mut out = String::new();

    out.push_str("TEST CASES\n");
    if report.cases.is_empty() {
        out.push_str("(no cases)\n");
    } else {
        let rows: Vec<Vec<String>> = report
            .cases
            .iter()
            .map(|c| {
                vec![
                    c.id.clone(),
                    c.objective.clone(),
                    c.actions.clone(),
                    c.expected.clone(),
                    c.status.label().to_string(),
                ]
            })
            .collect();
        table(&mut out, &["ID", "Objective", "Actions", "Expected", "Status"], &rows);
    }

    out.push_str("\nEXECUTION SUMMARY\n");
    let _ = writeln!(
        out,
        "No of TC Executed {} ({} of {})",
        format_pct(s.executed_pct),
        s.executed,
        s.total
    );
    let _ = writeln!(out, "Successful {} ({} of {})", format_pct(s.successful_pct), s.passed, s.total);
    let _ = writeln!(out, "Failed {} ({} of {})", format_pct(s.failed_pct), s.failed, s.total);
    let _ = writeln!(
        out,
        "No of TC Not Executed {} ({} of {})",
        format_pct(s.not_executed_pct),
        s.not_executed,
        s.total
    );
    let _ = writeln!(
        out,
        "Confusion TP={} TN={} FP={} FN={}",
        s.cm.tp, s.cm.tn, s.cm.fp, s.cm.fn_
    );
    match (s.accuracy_pct, s.error_pct) {
        (Some(a), Some(e)) => {
            let _ = writeln!(out, "Accuracy {}", format_pct(a));
            let _ = writeln!(out, "Error {}", format_pct(e));
        }
        _ => out.push_str("Accuracy n/a (no labels)\nError n/a (no labels)\n"),
    }

    out.push_str("\nINCIDENT LOG\n");
    if report.incidents.is_empty() {
        out.push_str("(no incidents)\n");
    } else {
        let rows: Vec<Vec<String>> = report
            .incidents
            .iter()
            .map(|i| {
                vec![
                    i.no.to_string(),
                    i.description.clone(),
                    i.case_ref.clone(),
                    format!("Severity {}", i.severity),
                    i.priority.to_string(),
                ]
            })
            .collect();
        table(&mut out, &["No.", "Description", "Case", "Severity", "Priority"], &rows);
    }
    out
}
