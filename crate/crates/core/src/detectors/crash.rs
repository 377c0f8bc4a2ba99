use crate::config::ControllerConfig;
use crate::types::{AlertKind, Timestamp};

use super::Trigger;

/// Latch for "lying over and not moving".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CrashState {
    pub over_tilt_since: Option<Timestamp>,
    /// The current latch has already produced its trigger.
    pub fired: bool,
}

/// High tilt alone is normal cornering lean, so a crash needs high tilt at
/// low speed held for `crash_hold_ms`. Any sample failing either gate
/// clears the latch. One trigger per latch.
pub fn crash_step(
    s: &CrashState,
    tilt_deg: f64,
    speed_kph: f64,
    t: Timestamp,
    cfg: &ControllerConfig,
) -> (CrashState, Option<Trigger>) {
    let gated = tilt_deg >= cfg.crash_tilt_deg && speed_kph <= cfg.crash_speed_max_kph;
    if !gated {
        return (CrashState::default(), None);
    }
    let since = s.over_tilt_since.unwrap_or(t);
    let mut next = CrashState {
        over_tilt_since: Some(since),
        fired: s.fired,
    };
    if !next.fired && t.since(since) >= cfg.crash_hold_ms {
        next.fired = true;
        let trigger = Trigger::new(
            AlertKind::Crash,
            format!("CRASH tilt {tilt_deg:.0} deg for {} ms", t.since(since)),
        );
        return (next, Some(trigger));
    }
    (next, None)
}
