use crate::config::ControllerConfig;
use crate::types::{AlertKind, ContractViolation, Timestamp};

use super::Trigger;

/// Time-to-collision in seconds, or `None` when the object is not closing.
pub fn ttc(range_m: f64, closing_speed_mps: f64) -> Result<Option<f64>, ContractViolation> {
    if range_m.is_nan() || range_m < 0.0 {
        return Err(ContractViolation(format!("range {range_m} m must be >= 0")));
    }
    if closing_speed_mps > 0.0 {
        Ok(Some(range_m / closing_speed_mps))
    } else {
        Ok(None)
    }
}

/// Rear LiDAR history. Closing speed needs two consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CollisionState {
    pub prev_range_m: Option<f64>,
    pub prev_t: Option<Timestamp>,
    /// TTC from the most recent usable sample pair.
    pub last_ttc_s: Option<f64>,
}

/// Finite-difference closing speed from the previous sample, no filtering.
/// A sample at the same instant with a different range is dropped.
pub fn collision_step(
    s: &CollisionState,
    range_m: f64,
    t: Timestamp,
    cfg: &ControllerConfig,
) -> (CollisionState, Option<Trigger>) {
    let (Some(prev_range), Some(prev_t)) = (s.prev_range_m, s.prev_t) else {
        let primed = CollisionState {
            prev_range_m: Some(range_m),
            prev_t: Some(t),
            last_ttc_s: None,
        };
        return (primed, None);
    };
    if t < prev_t {
        return (*s, None);
    }
    let dt_ms = t.since(prev_t);
    if dt_ms == 0 {
        return (*s, None);
    }
    let closing_mps = (prev_range - range_m) / (dt_ms as f64 / 1000.0);
    let time_to_contact = ttc(range_m, closing_mps).unwrap_or(None);
    let next = CollisionState {
        prev_range_m: Some(range_m),
        prev_t: Some(t),
        last_ttc_s: time_to_contact,
    };
    let trigger = match time_to_contact {
        Some(secs) if secs < cfg.ttc_warn_s => Some(Trigger::new(
            AlertKind::Collision,
            format!("COLLISION rear object {range_m:.1} m closing {closing_mps:.1} m/s ttc {secs:.2} s"),
        )),
        _ => None,
    };
    (next, trigger)
}
