//! Hazard detectors.
//!
//! Each detector is a pure step function over plain-data state: the same
//! state, input, and config always give the same new state and trigger.
//! Detectors never share state; the controller decides which triggers are
//! routed in which mode.

mod collision;
mod crash;
mod gas;
mod geo;
mod hazard;
mod magnet;
mod overspeed;
mod overtake;
mod theft;

pub use collision::{collision_step, ttc, CollisionState};
pub use crash::{crash_step, CrashState};
pub use gas::{breath_check, gas_leak_check, BreathResult, LeakResult};
pub use geo::{haversine_m, EARTH_RADIUS_M};
pub use hazard::hazard_step;
pub use magnet::{mag_step, MagState};
pub use overspeed::overspeed_step;
pub use overtake::{overtake_assist, OvertakeStatus};
pub use theft::{theft_step, TheftState};

use crate::types::AlertKind;

/// A detector's request to raise an alert. The router decides whether it
/// becomes one.
#[derive(Debug, Clone, PartialEq)]
pub struct Trigger {
    pub kind: AlertKind,
    pub message: String,
}

impl Trigger {
    pub fn new(kind: AlertKind, message: impl Into<String>) -> Self {
        Trigger {
            kind,
            message: message.into(),
        }
    }
}
