use crate::config::ControllerConfig;
use crate::types::AlertKind;

use super::Trigger;

/// Overspeed with hysteresis. Fires once when speed rises above the limit;
/// re-arms only after speed drops below `limit - hysteresis`.
pub fn overspeed_step(active: bool, speed_kph: f64, cfg: &ControllerConfig) -> (bool, Option<Trigger>) {
    if active {
        let still_active = speed_kph >= cfg.speed_limit_kph - cfg.speed_hysteresis_kph;
        (still_active, None)
    } else if speed_kph > cfg.speed_limit_kph {
        let trigger = Trigger::new(
            AlertKind::Overspeed,
            format!("OVERSPEED {speed_kph:.1} kph limit {:.1} kph", cfg.speed_limit_kph),
        );
        (true, Some(trigger))
    } else {
        (false, None)
    }
}
