//! Scenario files: one JSON object per line.
//!
//! The first non-blank line is the header:
//!
//! ```text
//! {"name":"crash_basic","objective":"...","config":{"crash_hold_ms":3000},
//!  "expected":[{"kind":"Crash","window_start_ms":5000,"window_end_ms":5200},{"kind":"Theft"}]}
//! ```
//!
//! A label with a window expects at least one alert of that kind inside it.
//! A label without a window is a negative label: no alert of that kind
//! anywhere in the run. Every following line is a sensor event,
//! `{"t_ms":0,"sensor":"lidar","range_m":20.0}`, in non-decreasing time order.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ControllerConfig, SetError};
use crate::types::{AlertKind, SensorEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start_ms: u64,
    pub end_ms: u64,
}

impl Window {
    pub fn contains(&self, t_ms: u64) -> bool {
        (self.start_ms..=self.end_ms).contains(&t_ms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLabel", into = "RawLabel")]
pub struct Label {
    pub kind: AlertKind,
    /// `None` marks a negative label.
    pub window: Option<Window>,
}

impl Label {
    pub fn positive(kind: AlertKind, start_ms: u64, end_ms: u64) -> Self {
        Label {
            kind,
            window: Some(Window { start_ms, end_ms }),
        }
    }

    pub fn negative(kind: AlertKind) -> Self {
        Label { kind, window: None }
    }

    pub fn is_negative(&self) -> bool {
        self.window.is_none()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLabel {
    kind: AlertKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window_start_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window_end_ms: Option<u64>,
}

impl TryFrom<RawLabel> for Label {
    type Error = String;

    fn try_from(r: RawLabel) -> Result<Self, Self::Error> {
        match (r.window_start_ms, r.window_end_ms) {
            (Some(start_ms), Some(end_ms)) if start_ms <= end_ms => Ok(Label {
                kind: r.kind,
                window: Some(Window { start_ms, end_ms }),
            }),
            (Some(s), Some(e)) => Err(format!("window start {s} after end {e}")),
            (None, None) => Ok(Label::negative(r.kind)),
            _ => Err("window_start_ms and window_end_ms must be given together".into()),
        }
    }
}

impl From<Label> for RawLabel {
    fn from(l: Label) -> Self {
        RawLabel {
            kind: l.kind,
            window_start_ms: l.window.map(|w| w.start_ms),
            window_end_ms: l.window.map(|w| w.end_ms),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<String>,
    #[serde(default)]
    config: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    expected: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub objective: Option<String>,
    /// Config overrides as written in the file.
    pub config: BTreeMap<String, serde_json::Value>,
    pub events: Vec<SensorEvent>,
    pub expected: Vec<Label>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Schema { line: usize, reason: String },
    #[error("event {index} is earlier than the event before it")]
    UnsortedEvents { index: usize },
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::parse(&text)
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header_text) = lines.next().ok_or(ScenarioError::Schema {
            line: 1,
            reason: "empty file, expected a header record".into(),
        })?;
        let header: Header = serde_json::from_str(header_text).map_err(|e| ScenarioError::Schema {
            line: header_line,
            reason: format!("bad header: {e}"),
        })?;
        let mut scratch = ControllerConfig::default();
        for (key, value) in &header.config {
            apply_override(&mut scratch, key, value).map_err(|reason| ScenarioError::Schema {
                line: header_line,
                reason,
            })?;
        }

        let mut events: Vec<SensorEvent> = Vec::new();
        for (line, record) in lines {
            let event: SensorEvent =
                serde_json::from_str(record).map_err(|e| ScenarioError::Schema { line, reason: e.to_string() })?;
            if let Some(prev) = events.last() {
                if event.t < prev.t {
                    return Err(ScenarioError::UnsortedEvents { index: events.len() });
                }
            }
            events.push(event);
        }

        Ok(Scenario {
            name: header.name,
            objective: header.objective,
            config: header.config,
            events,
            expected: header.expected,
        })
    }

    /// Serialize in the file format; [`Scenario::parse`] reads it back
    /// unchanged.
    pub fn to_jsonl(&self) -> String {
        let header = Header {
            name: self.name.clone(),
            objective: self.objective.clone(),
            config: self.config.clone(),
            expected: self.expected.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    /// `base` with this scenario's overrides applied. Not validated.
    pub fn effective_config(&self, base: &ControllerConfig) -> Result<ControllerConfig, String> {
        let mut cfg = base.clone();
        for (key, value) in &self.config {
            apply_override(&mut cfg, key, value)?;
        }
        Ok(cfg)
    }

    /// Scenario span: time of the last event.
    pub fn end_ms(&self) -> u64 {
        self.events.last().map_or(0, |e| e.t.0)
    }
}

fn apply_override(cfg: &mut ControllerConfig, key: &str, value: &serde_json::Value) -> Result<(), String> {
    let text = match value {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(format!("config `{key}`: unsupported value {other}")),
    };
    cfg.set(key, &text).map_err(|e| match e {
        SetError::UnknownKey => format!("unknown config key `{key}`"),
        SetError::BadValue(r) => format!("config `{key}`: {r}"),
    })
}
