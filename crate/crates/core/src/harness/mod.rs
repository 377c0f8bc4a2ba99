//! Scenario replay and evaluation.
//!
//! [`run`] feeds a [`Scenario`] through a fresh controller and captures an
//! [`EventLog`]; [`match_alerts`] scores the log's alerts against the
//! scenario's labels; [`Report`] rolls cases up into the printable tables.

mod eval;
mod log;
mod report;
mod scenario;

pub use eval::{match_alerts, ConfusionMatrix, MatchOutcome, Mismatch, UndefinedMetric};
pub use log::{run, EventLog, RunError};
pub use report::{format_pct, render_report, CaseResult, CaseStatus, Incident, Report, Summary};
pub use scenario::{load_scenario, Label, Scenario, ScenarioError, Window};

use std::collections::BTreeSet;

use crate::config::ControllerConfig;

fn describe_actions(sc: &Scenario) -> String {
    let sensors: BTreeSet<&str> = sc.events.iter().map(|e| e.payload.sensor_tag()).collect();
    let list = sensors.into_iter().collect::<Vec<_>>().join(", ");
    let noun = if sc.events.len() == 1 { "event" } else { "events" };
    if list.is_empty() {
        format!("{} {noun}", sc.events.len())
    } else {
        format!("{} {noun}: {list}", sc.events.len())
    }
}

fn describe_expected(labels: &[Label]) -> String {
    if labels.is_empty() {
        return "no labels".into();
    }
    labels
        .iter()
        .map(|l| match l.window {
            Some(w) => format!("{} in [{}, {}] ms", l.kind, w.start_ms, w.end_ms),
            None => format!("no {}", l.kind),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Run one scenario and score it. A case passes when it has no missed
/// windows and no unexpected alerts.
pub fn evaluate(sc: &Scenario, base: &ControllerConfig, id: impl Into<String>) -> CaseResult {
    let mut result = CaseResult {
        id: id.into(),
        name: sc.name.clone(),
        objective: sc.objective.clone().unwrap_or_else(|| sc.name.clone()),
        actions: describe_actions(sc),
        expected: describe_expected(&sc.expected),
        status: CaseStatus::NotExecuted,
        cm: ConfusionMatrix::default(),
        mismatches: Vec::new(),
        error: None,
    };
    match run(sc, base) {
        Ok(log) => {
            let outcome = match_alerts(log.alerts(), &sc.expected);
            result.status = if outcome.cm.is_clean() {
                CaseStatus::Pass
            } else {
                CaseStatus::Fail
            };
            result.cm = outcome.cm;
            result.mismatches = outcome.mismatches;
        }
        Err(e) => result.error = Some(e.to_string()),
    }
    result
}
