//! Controller thresholds and contacts.
//!
//! Every trigger level the controller uses lives here with a documented
//! default. Config files are flat `key=value` text; keys are the field names.

use std::fmt;

use thiserror::Error;

/// Upper end of the ethanol sensor's measurement range.
pub const ETHANOL_SENSOR_MAX_PPM: f64 = 500.0;
/// Lower end of the ethanol sensor's measurement range.
pub const ETHANOL_SENSOR_MIN_PPM: f64 = 10.0;
/// Shortest allowed beacon period.
pub const MIN_BEACON_PERIOD_MS: u64 = 60_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    /// Collision warning fires when time-to-collision drops below this.
    pub ttc_warn_s: f64,
    /// Magnetometer deviation from baseline counted as a vehicle sample.
    pub mag_deviation_ut: f64,
    pub mag_persist_samples: u32,
    pub mag_calib_samples: u32,
    /// Road-hazard warnings are suppressed at or below this speed.
    pub pir_speed_gate_kph: f64,
    pub ethanol_lockout_ppm: f64,
    pub lpg_leak_ppm: f64,
    pub speed_limit_kph: f64,
    pub speed_hysteresis_kph: f64,
    pub crash_tilt_deg: f64,
    pub crash_hold_ms: u64,
    pub crash_speed_max_kph: f64,
    pub geofence_radius_m: f64,
    pub beacon_period_ms: u64,
    pub sms_cooldown_ms: u64,
    pub owner_number: String,
    pub police_number: String,
    /// Threshold on the nominal 24 V supply.
    pub undervoltage_v: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            ttc_warn_s: 2.0,
            mag_deviation_ut: 5.0,
            mag_persist_samples: 3,
            mag_calib_samples: 20,
            pir_speed_gate_kph: 10.0,
            ethanol_lockout_ppm: 150.0,
            lpg_leak_ppm: 1000.0,
            speed_limit_kph: 80.0,
            speed_hysteresis_kph: 5.0,
            crash_tilt_deg: 60.0,
            crash_hold_ms: 3000,
            crash_speed_max_kph: 5.0,
            geofence_radius_m: 15.0,
            beacon_period_ms: 3_600_000,
            sms_cooldown_ms: 30_000,
            owner_number: "+639170000001".to_string(),
            police_number: "+639170000117".to_string(),
            undervoltage_v: 20.0,
        }
    }
}

/// Every config key, in declaration order.
pub const CONFIG_KEYS: [&str; 18] = [
    "ttc_warn_s",
    "mag_deviation_ut",
    "mag_persist_samples",
    "mag_calib_samples",
    "pir_speed_gate_kph",
    "ethanol_lockout_ppm",
    "lpg_leak_ppm",
    "speed_limit_kph",
    "speed_hysteresis_kph",
    "crash_tilt_deg",
    "crash_hold_ms",
    "crash_speed_max_kph",
    "geofence_radius_m",
    "beacon_period_ms",
    "sms_cooldown_ms",
    "owner_number",
    "police_number",
    "undervoltage_v",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldViolation {
    pub field: &'static str,
    pub reason: String,
}

/// All invariant violations found in a config, not only the first.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub violations: Vec<FieldViolation>,
}

impl ValidationError {
    pub fn fields(&self) -> Vec<&'static str> {
        self.violations.iter().map(|v| v.field).collect()
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for v in &self.violations {
            write!(f, "\n  {}: {}", v.field, v.reason)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue { line: usize, key: String, reason: String },
}

impl ControllerConfig {
    /// Parse a config file on top of the defaults. Unknown keys are an error.
    pub fn from_kv_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ControllerConfig::default();
        cfg.apply_kv_text(text)?;
        Ok(cfg)
    }

    pub fn apply_kv_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                SetError::UnknownKey => ConfigError::UnknownKey {
                    line,
                    key: key.trim().to_string(),
                },
                SetError::BadValue(reason) => ConfigError::BadValue {
                    line,
                    key: key.trim().to_string(),
                    reason,
                },
            })?;
        }
        Ok(())
    }

    /// Set one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SetError> {
        fn float(v: &str) -> Result<f64, SetError> {
            v.parse::<f64>().map_err(|e| SetError::BadValue(e.to_string()))
        }
        fn int<T: std::str::FromStr>(v: &str) -> Result<T, SetError>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| SetError::BadValue(e.to_string()))
        }
        match key {
            "ttc_warn_s" => self.ttc_warn_s = float(value)?,
            "mag_deviation_ut" => self.mag_deviation_ut = float(value)?,
            "mag_persist_samples" => self.mag_persist_samples = int(value)?,
            "mag_calib_samples" => self.mag_calib_samples = int(value)?,
            "pir_speed_gate_kph" => self.pir_speed_gate_kph = float(value)?,
            "ethanol_lockout_ppm" => self.ethanol_lockout_ppm = float(value)?,
            "lpg_leak_ppm" => self.lpg_leak_ppm = float(value)?,
            "speed_limit_kph" => self.speed_limit_kph = float(value)?,
            "speed_hysteresis_kph" => self.speed_hysteresis_kph = float(value)?,
            "crash_tilt_deg" => self.crash_tilt_deg = float(value)?,
            "crash_hold_ms" => self.crash_hold_ms = int(value)?,
            "crash_speed_max_kph" => self.crash_speed_max_kph = float(value)?,
            "geofence_radius_m" => self.geofence_radius_m = float(value)?,
            "beacon_period_ms" => self.beacon_period_ms = int(value)?,
            "sms_cooldown_ms" => self.sms_cooldown_ms = int(value)?,
            "owner_number" => self.owner_number = value.to_string(),
            "police_number" => self.police_number = value.to_string(),
            "undervoltage_v" => self.undervoltage_v = float(value)?,
            _ => return Err(SetError::UnknownKey),
        }
        Ok(())
    }

    /// Render as config-file text that [`ControllerConfig::from_kv_text`] reads back.
    pub fn to_kv_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("ttc_warn_s", self.ttc_warn_s.to_string()),
            ("mag_deviation_ut", self.mag_deviation_ut.to_string()),
            ("mag_persist_samples", self.mag_persist_samples.to_string()),
            ("mag_calib_samples", self.mag_calib_samples.to_string()),
            ("pir_speed_gate_kph", self.pir_speed_gate_kph.to_string()),
            ("ethanol_lockout_ppm", self.ethanol_lockout_ppm.to_string()),
            ("lpg_leak_ppm", self.lpg_leak_ppm.to_string()),
            ("speed_limit_kph", self.speed_limit_kph.to_string()),
            ("speed_hysteresis_kph", self.speed_hysteresis_kph.to_string()),
            ("crash_tilt_deg", self.crash_tilt_deg.to_string()),
            ("crash_hold_ms", self.crash_hold_ms.to_string()),
            ("crash_speed_max_kph", self.crash_speed_max_kph.to_string()),
            ("geofence_radius_m", self.geofence_radius_m.to_string()),
            ("beacon_period_ms", self.beacon_period_ms.to_string()),
            ("sms_cooldown_ms", self.sms_cooldown_ms.to_string()),
            ("owner_number", self.owner_number.clone()),
            ("police_number", self.police_number.clone()),
            ("undervoltage_v", self.undervoltage_v.to_string()),
        ]
    }

    /// Check every invariant and report all violations.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut violations = Vec::new();
        let mut bad = |field: &'static str, reason: String| violations.push(FieldViolation { field, reason });

        let floats = [
            ("ttc_warn_s", self.ttc_warn_s),
            ("mag_deviation_ut", self.mag_deviation_ut),
            ("pir_speed_gate_kph", self.pir_speed_gate_kph),
            ("ethanol_lockout_ppm", self.ethanol_lockout_ppm),
            ("lpg_leak_ppm", self.lpg_leak_ppm),
            ("speed_limit_kph", self.speed_limit_kph),
            ("speed_hysteresis_kph", self.speed_hysteresis_kph),
            ("crash_tilt_deg", self.crash_tilt_deg),
            ("crash_speed_max_kph", self.crash_speed_max_kph),
            ("geofence_radius_m", self.geofence_radius_m),
            ("undervoltage_v", self.undervoltage_v),
        ];
        for (field, v) in floats {
            if !v.is_finite() || v <= 0.0 {
                bad(field, "must be > 0".to_string());
            }
        }
        let ints = [
            ("mag_persist_samples", u64::from(self.mag_persist_samples)),
            ("mag_calib_samples", u64::from(self.mag_calib_samples)),
            ("crash_hold_ms", self.crash_hold_ms),
            ("beacon_period_ms", self.beacon_period_ms),
            ("sms_cooldown_ms", self.sms_cooldown_ms),
        ];
        for (field, v) in ints {
            if v == 0 {
                bad(field, "must be > 0".to_string());
            }
        }

        if self.ethanol_lockout_ppm > ETHANOL_SENSOR_MAX_PPM {
            bad("ethanol_lockout_ppm", format!("exceeds sensor range {ETHANOL_SENSOR_MAX_PPM} ppm"));
        } else if self.ethanol_lockout_ppm > 0.0 && self.ethanol_lockout_ppm < ETHANOL_SENSOR_MIN_PPM {
            bad("ethanol_lockout_ppm", format!("below sensor range {ETHANOL_SENSOR_MIN_PPM} ppm"));
        }
        if self.crash_tilt_deg > 180.0 {
            bad("crash_tilt_deg", "must be <= 180".to_string());
        }
        if self.beacon_period_ms != 0 && self.beacon_period_ms < MIN_BEACON_PERIOD_MS {
            bad("beacon_period_ms", format!("must be >= {MIN_BEACON_PERIOD_MS}"));
        }
        if !is_phone_number(&self.owner_number) {
            bad("owner_number", "must match +?[0-9]{7,15}".to_string());
        }
        if !is_phone_number(&self.police_number) {
            bad("police_number", "must match +?[0-9]{7,15}".to_string());
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { violations })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetError {
    UnknownKey,
    BadValue(String),
}

impl fmt::Display for SetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetError::UnknownKey => f.write_str("unknown key"),
            SetError::BadValue(r) => f.write_str(r),
        }
    }
}

/// `+?[0-9]{7,15}`
pub fn is_phone_number(s: &str) -> bool {
    let digits = s.strip_prefix('+').unwrap_or(s);
    (7..=15).contains(&digits.len()) && digits.bytes().all(|b| b.is_ascii_digit())
}
