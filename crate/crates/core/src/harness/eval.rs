//! Window matching and the Accuracy / Error formulas.

use serde::Serialize;
use thiserror::Error;

use crate::types::{Alert, AlertKind};

use super::scenario::{Label, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("metric undefined: confusion matrix is empty")]
pub struct UndefinedMetric;

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// `(TP + TN) / (TP + TN + FN + FP) × 100`
    pub fn accuracy(&self) -> Result<f64, UndefinedMetric> {
        let total = self.total();
        if total == 0 {
            return Err(UndefinedMetric);
        }
        Ok((self.tp + self.tn) as f64 / total as f64 * 100.0)
    }

    /// `(FP + FN) / (TP + TN + FN + FP) × 100`
    ///
    /// Computed as the complement of [`accuracy`](Self::accuracy) so the two
    /// always sum to exactly 100; this agrees with the direct formula to
    /// within a few ulps.
    pub fn error(&self) -> Result<f64, UndefinedMetric> {
        Ok(100.0 - self.accuracy()?)
    }

    /// No missed windows and no unexpected alerts.
    pub fn is_clean(&self) -> bool {
        self.fp == 0 && self.fn_ == 0
    }
}

impl std::ops::AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.tn += o.tn;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

/// Why a case did not match its labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mismatch {
    /// A positive window with no alert of its kind.
    Missed { kind: AlertKind, start_ms: u64, end_ms: u64 },
    /// An alert inside no positive window of its kind.
    Unexpected { kind: AlertKind, t_ms: u64 },
}

impl Mismatch {
    pub fn kind(&self) -> AlertKind {
        match self {
            Mismatch::Missed { kind, .. } | Mismatch::Unexpected { kind, .. } => *kind,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Mismatch::Missed { kind, start_ms, end_ms } => {
                format!("expected {kind} alert in [{start_ms}, {end_ms}] ms, none emitted")
            }
            Mismatch::Unexpected { kind, t_ms } => format!("unexpected {kind} alert at {t_ms} ms"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchOutcome {
    pub cm: ConfusionMatrix,
    pub mismatches: Vec<Mismatch>,
}

/// Score emitted alerts against labels.
///
/// Positive labels are served earliest window first; each takes the earliest
/// unclaimed alert of its kind inside its window (TP) or counts FN. An
/// alert is FP when it lies in no positive window of its kind; extra alerts
/// inside a window that is already satisfied are neither. A negative label
/// counts TN when no alert of its kind occurs at all.
pub fn match_alerts<'a>(alerts: impl IntoIterator<Item = &'a Alert>, labels: &[Label]) -> MatchOutcome {
    let alerts: Vec<&Alert> = alerts.into_iter().collect();
    let mut claimed = vec![false; alerts.len()];
    let mut out = MatchOutcome::default();

    let mut positives: Vec<(AlertKind, Window)> =
        labels.iter().filter_map(|l| l.window.map(|w| (l.kind, w))).collect();
    positives.sort_by_key(|(kind, w)| (w.start_ms, w.end_ms, *kind));

    for (kind, w) in &positives {
        let hit = alerts
            .iter()
            .enumerate()
            .filter(|(i, a)| !claimed[*i] && a.kind == *kind && w.contains(a.t.0))
            .min_by_key(|(i, a)| (a.t, *i))
            .map(|(i, _)| i);
        match hit {
            Some(i) => {
                claimed[i] = true;
                out.cm.tp += 1;
            }
            None => {
                out.cm.fn_ += 1;
                out.mismatches.push(Mismatch::Missed {
                    kind: *kind,
                    start_ms: w.start_ms,
                    end_ms: w.end_ms,
                });
            }
        }
    }

    for (i, a) in alerts.iter().enumerate() {
        if claimed[i] {
            continue;
        }
        let covered = positives.iter().any(|(kind, w)| *kind == a.kind && w.contains(a.t.0));
        if !covered {
            out.cm.fp += 1;
            out.mismatches.push(Mismatch::Unexpected {
                kind: a.kind,
                t_ms: a.t.0,
            });
        }
    }

    for l in labels.iter().filter(|l| l.is_negative()) {
        if !alerts.iter().any(|a| a.kind == l.kind) {
            out.cm.tn += 1;
        }
    }
    out
}
