//! Turns detector triggers into alerts, buzzer commands, and queued SMS.

use std::collections::{BTreeMap, VecDeque};

use crate::config::ControllerConfig;
use crate::detectors::Trigger;
use crate::gsm::{ByteChannel, ModemError, SmsModem};
use crate::types::{
    severity_of, truncate_sms, Action, ActuatorCommand, Alert, AlertKind, AlertSeverity, Timestamp,
};

pub const SMS_QUEUE_CAPACITY: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingSms {
    pub t: Timestamp,
    pub severity: AlertSeverity,
    pub to: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RouterState {
    last_emit: BTreeMap<AlertKind, Timestamp>,
    pending: VecDeque<PendingSms>,
    dropped: u64,
}

/// What one emitted alert produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    pub alert: Alert,
    /// Buzzer and SMS commands, in that order.
    pub commands: Vec<ActuatorCommand>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DrainReport {
    pub sent: usize,
    pub failures: Vec<ModemError>,
}

impl RouterState {
    pub fn pending(&self) -> impl Iterator<Item = &PendingSms> {
        self.pending.iter()
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    /// Messages discarded because the queue was full.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn last_emit(&self, kind: AlertKind) -> Option<Timestamp> {
        self.last_emit.get(&kind).copied()
    }

    /// Emit an alert unless the same kind was emitted less than
    /// `sms_cooldown_ms` ago. High-severity alerts and beacons also queue
    /// an SMS; High and Medium alerts sound the buzzer.
    pub fn route(&mut self, trigger: &Trigger, t: Timestamp, cfg: &ControllerConfig) -> Option<Routed> {
        if let Some(last) = self.last_emit.get(&trigger.kind) {
            if t.since(*last) < cfg.sms_cooldown_ms {
                return None;
            }
        }
        self.last_emit.insert(trigger.kind, t);

        let severity = severity_of(trigger.kind);
        let alert = Alert {
            t,
            kind: trigger.kind,
            severity,
            message: trigger.message.clone(),
        };
        let mut commands = Vec::new();
        if severity >= AlertSeverity::Medium {
            commands.push(ActuatorCommand {
                t,
                action: Action::Buzzer { on: true },
            });
        }
        if severity == AlertSeverity::High || trigger.kind == AlertKind::Beacon {
            let to = match trigger.kind {
                AlertKind::Crash => cfg.police_number.clone(),
                _ => cfg.owner_number.clone(),
            };
            let body = truncate_sms(&trigger.message);
            self.enqueue(PendingSms {
                t,
                severity,
                to: to.clone(),
                body: body.clone(),
            });
            commands.push(ActuatorCommand {
                t,
                action: Action::SmsSend { to, body },
            });
        }
        Some(Routed { alert, commands })
    }

    /// Push, then if over capacity drop the oldest entry of the lowest
    /// severity present (which may be the one just pushed).
    pub fn enqueue(&mut self, sms: PendingSms) {
        self.pending.push_back(sms);
        if self.pending.len() > SMS_QUEUE_CAPACITY {
            let lowest = self.pending.iter().map(|p| p.severity).min().expect("queue is non-empty");
            let victim = self
                .pending
                .iter()
                .position(|p| p.severity == lowest)
                .expect("lowest severity is present");
            self.pending.remove(victim);
            self.dropped += 1;
        }
    }

    /// Send queued messages in order. The first failure stops the drain,
    /// leaves that message queued, and triggers one modem re-init.
    pub fn drain_sms<C: ByteChannel>(&mut self, modem: &mut SmsModem<C>) -> DrainReport {
        let mut report = DrainReport::default();
        if self.pending.is_empty() {
            return report;
        }
        if !modem.is_ready() {
            if let Err(e) = modem.init() {
                report.failures.push(e);
                return report;
            }
        }
        while let Some(front) = self.pending.front() {
            match modem.send_sms(&front.to, &front.body) {
                Ok(_) => {
                    self.pending.pop_front();
                    report.sent += 1;
                }
                Err(e) => {
                    report.failures.push(e);
                    if let Err(e) = modem.init() {
                        report.failures.push(e);
                    }
                    break;
                }
            }
        }
        report
    }
}
