use crate::config::ControllerConfig;
use crate::types::AlertKind;

use super::Trigger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OvertakeStatus {
    #[default]
    Safe,
    Unsafe,
}

/// Overtaking is unsafe with a vehicle alongside or a rear closer under the
/// TTC warning level. Triggers only on the Safe to Unsafe edge.
pub fn overtake_assist(
    prev: OvertakeStatus,
    rear_ttc_s: Option<f64>,
    side_vehicle: bool,
    cfg: &ControllerConfig,
) -> (OvertakeStatus, Option<Trigger>) {
    let rear_threat = rear_ttc_s.is_some_and(|t| t < cfg.ttc_warn_s);
    let status = if side_vehicle || rear_threat {
        OvertakeStatus::Unsafe
    } else {
        OvertakeStatus::Safe
    };
    let trigger = (prev == OvertakeStatus::Safe && status == OvertakeStatus::Unsafe).then(|| {
        let reason = match (side_vehicle, rear_ttc_s) {
            (true, _) => "vehicle alongside".to_string(),
            (false, Some(t)) => format!("rear ttc {t:.2} s"),
            (false, None) => unreachable!("unsafe without a threat"),
        };
        Trigger::new(AlertKind::OvertakeUnsafe, format!("DO NOT OVERTAKE {reason}"))
    });
    (status, trigger)
}
