//! Event logs and deterministic scenario replay.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ControllerConfig, ValidationError};
use crate::controller::{Controller, Mode, Record};
use crate::gsm::{FakeModem, SmsModem};
use crate::types::{Action, ActuatorCommand, Alert, AlertKind, AlertSeverity, ContractViolation, Timestamp};

use super::scenario::Scenario;

/// Everything a run produced, in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub records: Vec<Record>,
}

#[derive(Serialize, Deserialize)]
struct LogLine {
    t_ms: u64,
    #[serde(flatten)]
    body: LogBody,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum LogBody {
    Alert {
        kind: AlertKind,
        severity: AlertSeverity,
        message: String,
    },
    Command(CommandBody),
    Mode {
        mode: Mode,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
enum CommandBody {
    Buzzer { on: bool },
    IgnitionInhibit { on: bool },
    SolenoidLock { engaged: bool },
    SmsSend { to: String, body: String },
}

impl From<&Record> for LogLine {
    fn from(r: &Record) -> Self {
        let body = match r {
            Record::Alert(a) => LogBody::Alert {
                kind: a.kind,
                severity: a.severity,
                message: a.message.clone(),
            },
            Record::Command(c) => LogBody::Command(match &c.action {
                Action::Buzzer { on } => CommandBody::Buzzer { on: *on },
                Action::IgnitionInhibit { on } => CommandBody::IgnitionInhibit { on: *on },
                Action::SolenoidLock { engaged } => CommandBody::SolenoidLock { engaged: *engaged },
                Action::SmsSend { to, body } => CommandBody::SmsSend {
                    to: to.clone(),
                    body: body.clone(),
                },
            }),
            Record::ModeChange { mode, .. } => LogBody::Mode { mode: *mode },
        };
        LogLine { t_ms: r.t().0, body }
    }
}

impl From<LogLine> for Record {
    fn from(l: LogLine) -> Self {
        let t = Timestamp(l.t_ms);
        match l.body {
            LogBody::Alert { kind, severity, message } => Record::Alert(Alert {
                t,
                kind,
                severity,
                message,
            }),
            LogBody::Command(c) => Record::Command(ActuatorCommand {
                t,
                action: match c {
                    CommandBody::Buzzer { on } => Action::Buzzer { on },
                    CommandBody::IgnitionInhibit { on } => Action::IgnitionInhibit { on },
                    CommandBody::SolenoidLock { engaged } => Action::SolenoidLock { engaged },
                    CommandBody::SmsSend { to, body } => Action::SmsSend { to, body },
                },
            }),
            LogBody::Mode { mode } => Record::ModeChange { t, mode },
        }
    }
}

impl EventLog {
    pub fn alerts(&self) -> impl Iterator<Item = &Alert> {
        self.records.iter().filter_map(|r| match r {
            Record::Alert(a) => Some(a),
            _ => None,
        })
    }

    pub fn commands(&self) -> impl Iterator<Item = &ActuatorCommand> {
        self.records.iter().filter_map(|r| match r {
            Record::Command(c) => Some(c),
            _ => None,
        })
    }

    /// Canonical text form: one JSON object per record, fixed field order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(&LogLine::from(r)).expect("log line serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<EventLog, (usize, serde_json::Error)> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let l: LogLine = serde_json::from_str(line).map_err(|e| (i + 1, e))?;
            records.push(l.into());
        }
        Ok(EventLog { records })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("scenario config: {0}")]
    Override(String),
    #[error(transparent)]
    Config(#[from] ValidationError),
    #[error("event {index}: {violation}")]
    Contract { index: usize, violation: ContractViolation },
}

/// Replay a scenario through a fresh controller.
///
/// Events sharing a timestamp are delivered as one step. Queued SMS are
/// drained through a compliant [`FakeModem`] after every step, so the run
/// uses virtual time only.
pub fn run(sc: &Scenario, base: &ControllerConfig) -> Result<EventLog, RunError> {
    let cfg = sc.effective_config(base).map_err(RunError::Override)?;
    let mut controller = Controller::new(cfg)?;
    let mut modem = SmsModem::new(FakeModem::compliant());
    // the compliant fake always initialises
    let _ = modem.init();

    let mut log = EventLog {
        records: vec![Record::ModeChange {
            t: Timestamp::ZERO,
            mode: controller.mode(),
        }],
    };
    let mut start = 0;
    while start < sc.events.len() {
        let t = sc.events[start].t;
        let end = start + sc.events[start..].iter().take_while(|e| e.t == t).count();
        let out = controller
            .step(t, &sc.events[start..end])
            .map_err(|violation| RunError::Contract { index: start, violation })?;
        log.records.extend(out.records);
        controller.drain_sms(&mut modem);
        start = end;
    }
    Ok(log)
}
