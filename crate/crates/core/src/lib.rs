//! Motorcycle safety controller.
//!
//! Timestamped sensor events go in; alerts, actuator commands, and SMS come
//! out. The [`harness`] replays recorded scenarios through the
//! [`controller`] and scores the output against labelled expectations.

pub mod cli;
pub mod config;
pub mod controller;
pub mod detectors;
pub mod gsm;
pub mod harness;
pub mod nmea;
pub mod types;

pub use config::{ControllerConfig, ValidationError};
pub use controller::{Controller, Mode, Record};
pub use types::{
    severity_of, Action, ActuatorCommand, Alert, AlertKind, AlertSeverity, ContractViolation, GasReading, GeoPoint,
    GpsFix, SensorEvent, SensorPayload, Timestamp,
};
