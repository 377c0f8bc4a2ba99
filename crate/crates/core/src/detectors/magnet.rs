use crate::config::ControllerConfig;
use crate::types::AlertKind;

use super::Trigger;

/// Magnetometer vehicle-presence detector.
///
/// The first `mag_calib_samples` readings are averaged into a fixed
/// baseline. After that, a run of `mag_persist_samples` consecutive
/// readings deviating from the baseline by more than `mag_deviation_ut`
/// signals a nearby vehicle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MagState {
    pub calib_buffer: Vec<f64>,
    pub baseline_ut: Option<f64>,
    /// Saturates at `mag_persist_samples`.
    pub consecutive_deviant: u32,
}

impl MagState {
    pub fn is_calibrated(&self) -> bool {
        self.baseline_ut.is_some()
    }

    /// A vehicle is currently beside the motorcycle.
    pub fn vehicle_present(&self, cfg: &ControllerConfig) -> bool {
        self.baseline_ut.is_some() && self.consecutive_deviant >= cfg.mag_persist_samples
    }
}

pub fn mag_step(s: &MagState, b_ut: f64, cfg: &ControllerConfig) -> (MagState, Option<Trigger>) {
    let Some(baseline) = s.baseline_ut else {
        let mut next = s.clone();
        next.calib_buffer.push(b_ut);
        if next.calib_buffer.len() >= cfg.mag_calib_samples as usize {
            let n = next.calib_buffer.len() as f64;
            next.baseline_ut = Some(next.calib_buffer.iter().sum::<f64>() / n);
        }
        return (next, None);
    };

    let mut next = s.clone();
    let deviation = (b_ut - baseline).abs();
    if deviation > cfg.mag_deviation_ut {
        if next.consecutive_deviant < cfg.mag_persist_samples {
            next.consecutive_deviant += 1;
            if next.consecutive_deviant == cfg.mag_persist_samples {
                let trigger = Trigger::new(
                    AlertKind::VehicleProximity,
                    format!("VEHICLE NEARBY field {b_ut:.1} uT baseline {baseline:.1} uT"),
                );
                return (next, Some(trigger));
            }
        }
    } else {
        next.consecutive_deviant = 0;
    }
    (next, None)
}
