use crate::config::ControllerConfig;
use crate::types::{AlertKind, GeoPoint, GpsFix, Timestamp};

use super::{haversine_m, Trigger};

/// Anti-theft geofence and location beacon.
///
/// Arms on the first valid fix seen with the ignition off and no authorized
/// rider, fencing the position of that fix. While armed, leaving the fence
/// raises one `Theft` trigger and the alarm stays latched until an
/// authorized rider disarms it. Beacons follow a fixed schedule anchored at
/// the arming time, at most one per fix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TheftState {
    pub parked_point: Option<GeoPoint>,
    pub last_beacon_t: Option<Timestamp>,
    pub armed: bool,
    /// The geofence has been breached since arming.
    pub alarmed: bool,
}

impl TheftState {
    pub fn disarmed() -> Self {
        TheftState::default()
    }
}

pub fn theft_step(
    s: &TheftState,
    fix: &GpsFix,
    ignition_on: bool,
    authorized: bool,
    t: Timestamp,
    cfg: &ControllerConfig,
) -> (TheftState, Vec<Trigger>) {
    if !fix.valid {
        return (*s, Vec::new());
    }
    if authorized {
        return (TheftState::disarmed(), Vec::new());
    }
    if !s.armed {
        if ignition_on {
            return (*s, Vec::new());
        }
        let armed = TheftState {
            parked_point: Some(fix.point),
            last_beacon_t: Some(t),
            armed: true,
            alarmed: false,
        };
        return (armed, Vec::new());
    }

    let mut next = *s;
    let mut triggers = Vec::new();
    let parked = s.parked_point.unwrap_or(fix.point);

    if !s.alarmed {
        let moved_m = haversine_m(parked, fix.point);
        if moved_m > cfg.geofence_radius_m {
            next.alarmed = true;
            triggers.push(Trigger::new(
                AlertKind::Theft,
                format!("THEFT ALERT moved {moved_m:.0} m from {parked} to {} t={}", fix.point, t),
            ));
        }
    }

    let last = s.last_beacon_t.unwrap_or(t);
    let elapsed = t.since(last);
    if elapsed >= cfg.beacon_period_ms {
        let periods = elapsed / cfg.beacon_period_ms;
        next.last_beacon_t = Some(Timestamp(last.0 + periods * cfg.beacon_period_ms));
        triggers.push(Trigger::new(AlertKind::Beacon, format!("LOCATION {} t={}", fix.point, t)));
    }
    (next, triggers)
}
