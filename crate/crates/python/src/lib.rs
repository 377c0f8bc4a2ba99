//! Python bindings for the motoguard safety controller.
//!
//! Events and log records cross the boundary as the same JSON objects the
//! scenario and event-log files use, so Python code can build them with
//! `json.dumps` and read them with `json.loads`.
//!
//!     import json, motoguard_py as mg
//!     c = mg.Controller()
//!     c.step(0, [json.dumps({"t_ms": 0, "sensor": "auth", "authorized": True})])
//!     print(c.mode)

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use motoguard::config::SetError;
use motoguard::detectors;
use motoguard::harness::{self, ConfusionMatrix, EventLog, Scenario};
use motoguard::nmea::{self, FixStatus};
use motoguard::{AlertKind, ControllerConfig, GeoPoint, SensorEvent, Timestamp};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

// =============================================================================
// NMEA and geometry helpers
// =============================================================================

/// Two-digit uppercase hex XOR checksum of a sentence body (between `$` and `*`).
#[pyfunction]
fn checksum(body: &str) -> PyResult<String> {
    nmea::checksum(body).map_err(value_error)
}

/// Parse a `$GPRMC` / `$GNRMC` sentence into a dict.
///
/// Raises:
///     ValueError: "<Variant>: <detail>", e.g. "ChecksumMismatch: ...".
#[pyfunction]
fn parse_rmc<'py>(py: Python<'py>, line: &str) -> PyResult<Bound<'py, PyDict>> {
    let r = nmea::parse_rmc(line).map_err(|e| PyValueError::new_err(format!("{}: {e}", e.name())))?;
    let d = PyDict::new(py);
    d.set_item("utc_time", r.utc_time)?;
    d.set_item("date", r.date)?;
    d.set_item("active", r.status == FixStatus::Active)?;
    d.set_item("lat_deg", r.point.lat_deg)?;
    d.set_item("lon_deg", r.point.lon_deg)?;
    d.set_item("speed_knots", r.speed_knots)?;
    d.set_item("course_deg", r.course_deg)?;
    Ok(d)
}

#[pyfunction]
fn knots_to_kph(knots: f64) -> PyResult<f64> {
    nmea::knots_to_kph(knots).map_err(value_error)
}

/// Great-circle distance in metres.
#[pyfunction]
fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> PyResult<f64> {
    let a = GeoPoint::new(lat1, lon1).map_err(value_error)?;
    let b = GeoPoint::new(lat2, lon2).map_err(value_error)?;
    Ok(detectors::haversine_m(a, b))
}

/// Time to collision in seconds, or None when the gap is not closing.
#[pyfunction]
fn ttc(range_m: f64, closing_mps: f64) -> PyResult<Option<f64>> {
    detectors::ttc(range_m, closing_mps).map_err(value_error)
}

/// Severity ("Low", "Medium", "High") of an alert kind such as "Crash".
#[pyfunction]
fn severity_of(kind: &str) -> PyResult<String> {
    let k = AlertKind::from_name(kind).ok_or_else(|| PyValueError::new_err(format!("unknown alert kind `{kind}`")))?;
    Ok(motoguard::severity_of(k).to_string())
}

// =============================================================================
// Evaluation formulas
// =============================================================================

/// (TP + TN) / (TP + TN + FN + FP) x 100. Raises ValueError on an empty matrix.
#[pyfunction]
fn accuracy(tp: u64, tn: u64, fp: u64, fn_: u64) -> PyResult<f64> {
    ConfusionMatrix::new(tp, tn, fp, fn_).accuracy().map_err(value_error)
}

/// (FP + FN) / (TP + TN + FN + FP) x 100. Raises ValueError on an empty matrix.
#[pyfunction]
fn error(tp: u64, tn: u64, fp: u64, fn_: u64) -> PyResult<f64> {
    ConfusionMatrix::new(tp, tn, fp, fn_).error().map_err(value_error)
}

// =============================================================================
// Config
// =============================================================================

/// Controller configuration; starts from the defaults.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: ControllerConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    fn new() -> Self {
        PyConfig {
            inner: ControllerConfig::default(),
        }
    }

    /// Parse `key = value` lines (with `#` comments) over the defaults.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = ControllerConfig::from_kv_text(text).map_err(value_error)?;
        Ok(PyConfig { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_kv_text()
    }

    /// Current value of `key`, as text.
    fn get(&self, key: &str) -> PyResult<String> {
        self.inner
            .entries()
            .into_iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| PyValueError::new_err(format!("unknown config key `{key}`")))
    }

    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.set(key, value).map_err(|e| match e {
            SetError::UnknownKey => PyValueError::new_err(format!("unknown config key `{key}`")),
            SetError::BadValue(r) => PyValueError::new_err(format!("config `{key}`: {r}")),
        })
    }

    fn keys(&self) -> Vec<&'static str> {
        motoguard::config::CONFIG_KEYS.to_vec()
    }

    /// Raise ValueError listing every out-of-range field.
    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(value_error)
    }

    /// Names of the fields that fail validation (empty when valid).
    fn invalid_fields(&self) -> Vec<&'static str> {
        self.inner.validate().err().map(|e| e.fields()).unwrap_or_default()
    }
}

// =============================================================================
// Controller and scenario replay
// =============================================================================

/// The mode-aware controller. `step` takes JSON sensor events and returns
/// JSON event-log records.
#[pyclass]
struct Controller {
    inner: motoguard::Controller,
}

#[pymethods]
impl Controller {
    #[new]
    #[pyo3(signature = (config=None))]
    fn new(config: Option<PyConfig>) -> PyResult<Self> {
        let cfg = config.map(|c| c.inner).unwrap_or_default();
        let inner = motoguard::Controller::new(cfg).map_err(value_error)?;
        Ok(Controller { inner })
    }

    /// Current mode name, e.g. "Parked".
    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    /// Apply all events stamped `t_ms`.
    ///
    /// Args:
    ///     t_ms: Step time; not earlier than the previous step.
    ///     events: JSON objects like '{"t_ms":0,"sensor":"pir","detected":true}'.
    ///
    /// Returns:
    ///     Event-log records as JSON strings, in emission order.
    fn step(&mut self, t_ms: u64, events: Vec<String>) -> PyResult<Vec<String>> {
        let events = events
            .iter()
            .map(|e| serde_json::from_str::<SensorEvent>(e).map_err(value_error))
            .collect::<PyResult<Vec<_>>>()?;
        let out = self.inner.step(Timestamp(t_ms), &events).map_err(value_error)?;
        let log = EventLog { records: out.records };
        Ok(log.to_jsonl().lines().map(String::from).collect())
    }
}

/// Replay scenario text (header line plus events) and return the event log
/// as JSON lines.
#[pyfunction]
#[pyo3(signature = (text, config=None))]
fn run_scenario(text: &str, config: Option<PyConfig>) -> PyResult<String> {
    let sc = Scenario::parse(text).map_err(value_error)?;
    let base = config.map(|c| c.inner).unwrap_or_default();
    let log = harness::run(&sc, &base).map_err(value_error)?;
    Ok(log.to_jsonl())
}

/// Replay and score scenario text against its labels.
///
/// Returns:
///     dict with "passed", "tp", "tn", "fp", "fn" and "mismatches".
#[pyfunction]
#[pyo3(signature = (text, config=None))]
fn evaluate_scenario<'py>(py: Python<'py>, text: &str, config: Option<PyConfig>) -> PyResult<Bound<'py, PyDict>> {
    let sc = Scenario::parse(text).map_err(value_error)?;
    let base = config.map(|c| c.inner).unwrap_or_default();
    let r = harness::evaluate(&sc, &base, sc.name.clone());
    if let Some(e) = r.error {
        return Err(PyValueError::new_err(e));
    }
    let d = PyDict::new(py);
    d.set_item("passed", r.status == harness::CaseStatus::Pass)?;
    d.set_item("tp", r.cm.tp)?;
    d.set_item("tn", r.cm.tn)?;
    d.set_item("fp", r.cm.fp)?;
    d.set_item("fn", r.cm.fn_)?;
    d.set_item("mismatches", r.mismatches.iter().map(|m| m.describe()).collect::<Vec<_>>())?;
    Ok(d)
}

#[pymodule]
fn motoguard_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(checksum, m)?)?;
    m.add_function(wrap_pyfunction!(parse_rmc, m)?)?;
    m.add_function(wrap_pyfunction!(knots_to_kph, m)?)?;
    m.add_function(wrap_pyfunction!(haversine_m, m)?)?;
    m.add_function(wrap_pyfunction!(ttc, m)?)?;
    m.add_function(wrap_pyfunction!(severity_of, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(error, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_scenario, m)?)?;
    m.add_class::<PyConfig>()?;
    m.add_class::<Controller>()?;
    Ok(())
}
