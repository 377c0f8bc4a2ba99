use crate::config::ControllerConfig;
use crate::types::AlertKind;

use super::Trigger;

/// PIR road-hazard warning, suppressed at walking pace.
pub fn hazard_step(detected: bool, speed_kph: f64, cfg: &ControllerConfig) -> Option<Trigger> {
    if detected && speed_kph > cfg.pir_speed_gate_kph {
        Some(Trigger::new(
            AlertKind::RoadHazard,
            format!("ROAD HAZARD motion ahead at {speed_kph:.1} kph"),
        ))
    } else {
        None
    }
}
