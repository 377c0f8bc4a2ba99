//! Domain values shared by every part of the controller.
//!
//! All types here are plain immutable data. Constructors validate ranges;
//! values that arrive through deserialization are checked with
//! [`SensorEvent::validate`] before they reach a detector.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Longest SMS body sent as a single part.
pub const SMS_MAX_CHARS: usize = 160;

/// A caller broke a documented precondition.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("contract violation: {0}")]
pub struct ContractViolation(pub String);

/// A field value outside its documented range.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid {field}: {reason}")]
pub struct InvalidValue {
    pub field: &'static str,
    pub reason: String,
}

impl InvalidValue {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

/// Milliseconds since scenario start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub const ZERO: Timestamp = Timestamp(0);

    pub fn from_millis(millis: u64) -> Self {
        Timestamp(millis)
    }

    pub fn millis(self) -> u64 {
        self.0
    }

    /// Milliseconds from `earlier` to `self`, saturating at zero.
    pub fn since(self, earlier: Timestamp) -> u64 {
        self.0.saturating_sub(earlier.0)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A WGS-84 position in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoPoint {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self, InvalidValue> {
        let p = GeoPoint { lat_deg, lon_deg };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), InvalidValue> {
        if !self.lat_deg.is_finite() || !(-90.0..=90.0).contains(&self.lat_deg) {
            return Err(InvalidValue::new("lat_deg", format!("{} outside [-90, 90]", self.lat_deg)));
        }
        if !self.lon_deg.is_finite() || !(-180.0..=180.0).contains(&self.lon_deg) {
            return Err(InvalidValue::new("lon_deg", format!("{} outside [-180, 180]", self.lon_deg)));
        }
        Ok(())
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6},{:.6}", self.lat_deg, self.lon_deg)
    }
}

/// One MiCS5524 sample. The same sensor serves breath checks (ethanol) and
/// leak detection (LPG-class gases).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasReading {
    pub ethanol_ppm: f64,
    pub co_ppm: f64,
    pub lpg_ppm: f64,
}

impl GasReading {
    pub fn new(ethanol_ppm: f64, co_ppm: f64, lpg_ppm: f64) -> Result<Self, InvalidValue> {
        let g = GasReading {
            ethanol_ppm,
            co_ppm,
            lpg_ppm,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), InvalidValue> {
        non_negative("ethanol_ppm", self.ethanol_ppm)?;
        non_negative("co_ppm", self.co_ppm)?;
        non_negative("lpg_ppm", self.lpg_ppm)
    }
}

/// A GPS fix as consumed by the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpsFix {
    pub point: GeoPoint,
    pub speed_kph: f64,
    pub valid: bool,
}

impl GpsFix {
    pub fn new(point: GeoPoint, speed_kph: f64, valid: bool) -> Result<Self, InvalidValue> {
        let f = GpsFix {
            point,
            speed_kph,
            valid,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), InvalidValue> {
        self.point.validate()?;
        non_negative("speed_kph", self.speed_kph)
    }
}

/// Sensor-specific part of an event. The serialized tag is the `sensor`
/// field of a scenario record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sensor", deny_unknown_fields)]
pub enum SensorPayload {
    #[serde(rename = "lidar")]
    LidarRange { range_m: f64 },
    #[serde(rename = "mag")]
    MagField { b_ut: f64 },
    #[serde(rename = "pir")]
    PirMotion { detected: bool },
    #[serde(rename = "gas")]
    GasReading(GasReading),
    /// Angle from vertical.
    #[serde(rename = "tilt")]
    Tilt { angle_deg: f64 },
    #[serde(rename = "gps")]
    GpsFix(GpsFix),
    #[serde(rename = "ignition")]
    Ignition { on: bool },
    /// Outcome of the rider identification step.
    #[serde(rename = "auth")]
    Auth { authorized: bool },
    #[serde(rename = "supply")]
    SupplyVoltage { volts: f64 },
}

impl SensorPayload {
    pub fn validate(&self) -> Result<(), InvalidValue> {
        match *self {
            SensorPayload::LidarRange { range_m } => non_negative("range_m", range_m),
            SensorPayload::MagField { b_ut } => non_negative("b_ut", b_ut),
            SensorPayload::GasReading(g) => g.validate(),
            SensorPayload::Tilt { angle_deg } => {
                if angle_deg.is_finite() && (0.0..=180.0).contains(&angle_deg) {
                    Ok(())
                } else {
                    Err(InvalidValue::new("angle_deg", format!("{angle_deg} outside [0, 180]")))
                }
            }
            SensorPayload::GpsFix(f) => f.validate(),
            SensorPayload::SupplyVoltage { volts } => non_negative("volts", volts),
            SensorPayload::PirMotion { .. } | SensorPayload::Ignition { .. } | SensorPayload::Auth { .. } => Ok(()),
        }
    }

    /// The scenario-file tag for this payload.
    pub fn sensor_tag(&self) -> &'static str {
        match self {
            SensorPayload::LidarRange { .. } => "lidar",
            SensorPayload::MagField { .. } => "mag",
            SensorPayload::PirMotion { .. } => "pir",
            SensorPayload::GasReading(_) => "gas",
            SensorPayload::Tilt { .. } => "tilt",
            SensorPayload::GpsFix(_) => "gps",
            SensorPayload::Ignition { .. } => "ignition",
            SensorPayload::Auth { .. } => "auth",
            SensorPayload::SupplyVoltage { .. } => "supply",
        }
    }
}

/// A timestamped reading from one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EventRecord", into = "EventRecord")]
pub struct SensorEvent {
    pub t: Timestamp,
    pub payload: SensorPayload,
}

impl SensorEvent {
    pub fn new(t: Timestamp, payload: SensorPayload) -> Result<Self, InvalidValue> {
        payload.validate()?;
        Ok(SensorEvent { t, payload })
    }

    pub fn validate(&self) -> Result<(), InvalidValue> {
        self.payload.validate()
    }
}

/// Wire shape of a [`SensorEvent`]: `t_ms` followed by the tagged payload.
#[derive(Serialize, Deserialize)]
struct EventRecord {
    t_ms: u64,
    #[serde(flatten)]
    payload: SensorPayload,
}

impl TryFrom<EventRecord> for SensorEvent {
    type Error = InvalidValue;

    fn try_from(r: EventRecord) -> Result<Self, Self::Error> {
        SensorEvent::new(Timestamp(r.t_ms), r.payload)
    }
}

impl From<SensorEvent> for EventRecord {
    fn from(e: SensorEvent) -> Self {
        EventRecord {
            t_ms: e.t.0,
            payload: e.payload,
        }
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<(), InvalidValue> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(InvalidValue::new(field, format!("{v} must be finite and >= 0")))
    }
}

/// Severity, which doubles as incident priority. Ordered `Low < Medium < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AlertSeverity {
    Low,
    Medium,
    High,
}

impl AlertSeverity {
    /// Severity class number used in incident logs (1 is the most severe).
    pub fn class(self) -> u8 {
        match self {
            AlertSeverity::High => 1,
            AlertSeverity::Medium => 2,
            AlertSeverity::Low => 3,
        }
    }
}

impl fmt::Display for AlertSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlertSeverity::High => "High",
            AlertSeverity::Medium => "Medium",
            AlertSeverity::Low => "Low",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AlertKind {
    Collision,
    VehicleProximity,
    RoadHazard,
    AlcoholLockout,
    GasLeak,
    Overspeed,
    Crash,
    OvertakeUnsafe,
    Theft,
    Beacon,
    /// Supply rail below the configured undervoltage level.
    LowVoltage,
}

impl AlertKind {
    pub const ALL: [AlertKind; 11] = [
        AlertKind::Collision,
        AlertKind::VehicleProximity,
        AlertKind::RoadHazard,
        AlertKind::AlcoholLockout,
        AlertKind::GasLeak,
        AlertKind::Overspeed,
        AlertKind::Crash,
        AlertKind::OvertakeUnsafe,
        AlertKind::Theft,
        AlertKind::Beacon,
        AlertKind::LowVoltage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlertKind::Collision => "Collision",
            AlertKind::VehicleProximity => "VehicleProximity",
            AlertKind::RoadHazard => "RoadHazard",
            AlertKind::AlcoholLockout => "AlcoholLockout",
            AlertKind::GasLeak => "GasLeak",
            AlertKind::Overspeed => "Overspeed",
            AlertKind::Crash => "Crash",
            AlertKind::OvertakeUnsafe => "OvertakeUnsafe",
            AlertKind::Theft => "Theft",
            AlertKind::Beacon => "Beacon",
            AlertKind::LowVoltage => "LowVoltage",
        }
    }

    pub fn from_name(name: &str) -> Option<AlertKind> {
        AlertKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for AlertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed severity of each alert kind.
///
/// Hazards with no workaround for the rider (crash, imminent collision,
/// theft, failed breath or gas check) are `High`; conditions the rider can
/// work around are `Medium`; informational messages are `Low`.
pub fn severity_of(kind: AlertKind) -> AlertSeverity {
    match kind {
        AlertKind::Crash
        | AlertKind::Collision
        | AlertKind::Theft
        | AlertKind::AlcoholLockout
        | AlertKind::GasLeak => AlertSeverity::High,
        AlertKind::Overspeed | AlertKind::VehicleProximity | AlertKind::OvertakeUnsafe => AlertSeverity::Medium,
        AlertKind::RoadHazard | AlertKind::Beacon | AlertKind::LowVoltage => AlertSeverity::Low,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alert {
    pub t: Timestamp,
    pub kind: AlertKind,
    pub severity: AlertSeverity,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Buzzer { on: bool },
    IgnitionInhibit { on: bool },
    SolenoidLock { engaged: bool },
    SmsSend { to: String, body: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActuatorCommand {
    pub t: Timestamp,
    pub action: Action,
}

/// Bodies over 160 characters become their first 157 characters plus `...`.
pub fn truncate_sms(body: &str) -> String {
    if body.chars().count() <= SMS_MAX_CHARS {
        return body.to_string();
    }
    let mut out: String = body.chars().take(SMS_MAX_CHARS - 3).collect();
    out.push_str("...");
    out
}
