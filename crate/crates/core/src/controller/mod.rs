//! Mode-aware orchestration of the detectors.
//!
//! Mode table:
//!
//! | from            | on                                           | to              |
//! |-----------------|----------------------------------------------|-----------------|
//! | Parked          | ignition on, rider authorized                | PreRide         |
//! | Parked          | ignition on, not authorized (lock + alert)   | TheftSuspected  |
//! | Parked          | geofence breach                              | TheftSuspected  |
//! | PreRide         | breath pass and no gas leak after the window | Riding          |
//! | PreRide         | breath fail or gas leak (ignition inhibited) | Parked          |
//! | PreRide, Riding | ignition off                                 | Parked          |
//! | Riding          | crash                                        | CrashSuspected  |
//! | CrashSuspected  | authorized rider (manual all-clear)          | Parked          |
//! | TheftSuspected  | authorized rider                             | Parked          |
//!
//! Events inside one step are applied in list order.

mod router;

pub use router::{DrainReport, PendingSms, RouterState, Routed, SMS_QUEUE_CAPACITY};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{ControllerConfig, ValidationError};
use crate::detectors::{
    breath_check, collision_step, crash_step, gas_leak_check, hazard_step, mag_step, overspeed_step,
    overtake_assist, theft_step, BreathResult, CollisionState, CrashState, LeakResult, MagState, OvertakeStatus,
    TheftState, Trigger,
};
use crate::gsm::{ByteChannel, SmsModem};
use crate::types::{
    Action, ActuatorCommand, Alert, AlertKind, ContractViolation, GasReading, GpsFix, SensorEvent, SensorPayload,
    Timestamp,
};

/// Gas samples collected after an authorized start before the checks run.
pub const PRERIDE_WINDOW_MS: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Parked,
    PreRide,
    Riding,
    CrashSuspected,
    TheftSuspected,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One controller output, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Alert(Alert),
    Command(ActuatorCommand),
    ModeChange { t: Timestamp, mode: Mode },
}

impl Record {
    pub fn t(&self) -> Timestamp {
        match self {
            Record::Alert(a) => a.t,
            Record::Command(c) => c.t,
            Record::ModeChange { t, .. } => *t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepOutput {
    pub records: Vec<Record>,
}

impl StepOutput {
    pub fn alerts(&self) -> impl Iterator<Item = &Alert> {
        self.records.iter().filter_map(|r| match r {
            Record::Alert(a) => Some(a),
            _ => None,
        })
    }

    pub fn commands(&self) -> impl Iterator<Item = &ActuatorCommand> {
        self.records.iter().filter_map(|r| match r {
            Record::Command(c) => Some(c),
            _ => None,
        })
    }

    pub fn mode_changes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.records.iter().filter_map(|r| match r {
            Record::ModeChange { mode, .. } => Some(*mode),
            _ => None,
        })
    }
}

/// Everything the controller remembers between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub mode: Mode,
    pub last_t: Option<Timestamp>,
    pub ignition_on: bool,
    pub authorized: bool,
    pub ignition_inhibited: bool,
    pub solenoid_locked: bool,
    pub last_fix: Option<GpsFix>,
    pub speed_kph: f64,
    pub preride_start: Option<Timestamp>,
    pub preride_readings: Vec<GasReading>,
    pub collision: CollisionState,
    pub mag: MagState,
    pub overtake: OvertakeStatus,
    pub overspeed_active: bool,
    pub crash: CrashState,
    pub theft: TheftState,
    pub router: RouterState,
}

impl Default for ControllerState {
    fn default() -> Self {
        ControllerState {
            mode: Mode::Parked,
            last_t: None,
            ignition_on: false,
            authorized: false,
            ignition_inhibited: false,
            solenoid_locked: false,
            last_fix: None,
            speed_kph: 0.0,
            preride_start: None,
            preride_readings: Vec::new(),
            collision: CollisionState::default(),
            mag: MagState::default(),
            overtake: OvertakeStatus::Safe,
            overspeed_active: false,
            crash: CrashState::default(),
            theft: TheftState::default(),
            router: RouterState::default(),
        }
    }
}

/// The safety controller for one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    cfg: ControllerConfig,
    state: ControllerState,
}

impl Controller {
    pub fn new(cfg: ControllerConfig) -> Result<Self, ValidationError> {
        cfg.validate()?;
        Ok(Controller {
            cfg,
            state: ControllerState::default(),
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.cfg
    }

    pub fn state(&self) -> &ControllerState {
        &self.state
    }

    pub fn mode(&self) -> Mode {
        self.state.mode
    }

    pub fn router(&self) -> &RouterState {
        &self.state.router
    }

    /// Send queued SMS through `modem`.
    pub fn drain_sms<C: ByteChannel>(&mut self, modem: &mut SmsModem<C>) -> DrainReport {
        self.state.router.drain_sms(modem)
    }

    /// Apply all events that happened at time `t`.
    pub fn step(&mut self, t: Timestamp, events: &[SensorEvent]) -> Result<StepOutput, ContractViolation> {
        if let Some(last) = self.state.last_t {
            if t < last {
                return Err(ContractViolation(format!("step at t={t} after t={last}")));
            }
        }
        for (i, e) in events.iter().enumerate() {
            if e.t != t {
                return Err(ContractViolation(format!("event {i} has t={} in step t={t}", e.t)));
            }
            e.validate()
                .map_err(|err| ContractViolation(format!("event {i}: {err}")))?;
        }
        self.state.last_t = Some(t);

        let mut out = StepOutput::default();
        for e in events {
            self.apply(t, &e.payload, &mut out);
        }
        if self.state.mode == Mode::PreRide {
            self.evaluate_preride(t, &mut out);
        }
        Ok(out)
    }

    fn apply(&mut self, t: Timestamp, payload: &SensorPayload, out: &mut StepOutput) {
        match *payload {
            SensorPayload::Auth { authorized } => self.on_auth(t, authorized, out),
            SensorPayload::Ignition { on } => self.on_ignition(t, on, out),
            SensorPayload::GasReading(g) => {
                if self.state.mode == Mode::PreRide {
                    self.state.preride_readings.push(g);
                }
            }
            SensorPayload::GpsFix(fix) => self.on_fix(t, fix, out),
            SensorPayload::LidarRange { range_m } => {
                let (next, trigger) = collision_step(&self.state.collision, range_m, t, &self.cfg);
                self.state.collision = next;
                if self.state.mode == Mode::Riding {
                    if let Some(trigger) = trigger {
                        self.raise(t, trigger, out);
                    }
                    self.update_overtake(t, out);
                }
            }
            SensorPayload::MagField { b_ut } => {
                let (next, trigger) = mag_step(&self.state.mag, b_ut, &self.cfg);
                self.state.mag = next;
                if self.state.mode == Mode::Riding {
                    if let Some(trigger) = trigger {
                        self.raise(t, trigger, out);
                    }
                    self.update_overtake(t, out);
                }
            }
            SensorPayload::PirMotion { detected } => {
                if self.state.mode == Mode::Riding {
                    if let Some(trigger) = hazard_step(detected, self.state.speed_kph, &self.cfg) {
                        self.raise(t, trigger, out);
                    }
                }
            }
            SensorPayload::Tilt { angle_deg } => {
                if self.state.mode != Mode::Riding {
                    self.state.crash = CrashState::default();
                    return;
                }
                let (next, trigger) = crash_step(&self.state.crash, angle_deg, self.state.speed_kph, t, &self.cfg);
                self.state.crash = next;
                if trigger.is_some() {
                    let place = match self.state.last_fix {
                        Some(f) => f.point.to_string(),
                        None => "no-fix".to_string(),
                    };
                    let trigger = Trigger::new(AlertKind::Crash, format!("CRASH {place} t={t}"));
                    self.raise(t, trigger, out);
                    self.set_mode(t, Mode::CrashSuspected, out);
                }
            }
            SensorPayload::SupplyVoltage { volts } => {
                if volts < self.cfg.undervoltage_v {
                    let trigger = Trigger::new(
                        AlertKind::LowVoltage,
                        format!("LOW VOLTAGE {volts:.1} V below {:.1} V", self.cfg.undervoltage_v),
                    );
                    self.raise(t, trigger, out);
                }
            }
        }
    }

    fn on_auth(&mut self, t: Timestamp, authorized: bool, out: &mut StepOutput) {
        self.state.authorized = authorized;
        if !authorized {
            return;
        }
        self.state.theft = TheftState::disarmed();
        match self.state.mode {
            Mode::TheftSuspected | Mode::CrashSuspected => {
                self.command(t, Action::Buzzer { on: false }, out);
                self.unlock(t, out);
                self.state.crash = CrashState::default();
                self.set_mode(t, Mode::Parked, out);
            }
            Mode::Parked => self.unlock(t, out),
            Mode::PreRide | Mode::Riding => {}
        }
    }

    fn on_ignition(&mut self, t: Timestamp, on: bool, out: &mut StepOutput) {
        self.state.ignition_on = on;
        if on {
            match self.state.mode {
                Mode::Parked if self.state.authorized => {
                    self.state.preride_start = Some(t);
                    self.state.preride_readings.clear();
                    self.set_mode(t, Mode::PreRide, out);
                }
                Mode::Parked | Mode::TheftSuspected => self.unauthorized_start(t, out),
                _ => {}
            }
            return;
        }
        match self.state.mode {
            Mode::PreRide | Mode::Riding => {
                // the authorization covers one ride
                self.state.authorized = false;
                self.end_ride();
                self.set_mode(t, Mode::Parked, out);
            }
            _ => {}
        }
    }

    fn unauthorized_start(&mut self, t: Timestamp, out: &mut StepOutput) {
        if !self.state.solenoid_locked {
            self.state.solenoid_locked = true;
            self.command(t, Action::SolenoidLock { engaged: true }, out);
        }
        let place = match self.state.last_fix {
            Some(f) => f.point.to_string(),
            None => "no-fix".to_string(),
        };
        let trigger = Trigger::new(AlertKind::Theft, format!("THEFT ALERT unauthorized ignition at {place} t={t}"));
        self.raise(t, trigger, out);
        if self.state.mode == Mode::Parked {
            self.set_mode(t, Mode::TheftSuspected, out);
        }
    }

    fn on_fix(&mut self, t: Timestamp, fix: GpsFix, out: &mut StepOutput) {
        if !fix.valid {
            return;
        }
        self.state.last_fix = Some(fix);
        self.state.speed_kph = fix.speed_kph;

        let (theft, triggers) = theft_step(
            &self.state.theft,
            &fix,
            self.state.ignition_on,
            self.state.authorized,
            t,
            &self.cfg,
        );
        self.state.theft = theft;
        if matches!(self.state.mode, Mode::Parked | Mode::TheftSuspected) {
            for trigger in triggers {
                let breach = trigger.kind == AlertKind::Theft;
                self.raise(t, trigger, out);
                if breach && self.state.mode == Mode::Parked {
                    self.set_mode(t, Mode::TheftSuspected, out);
                }
            }
        }

        if self.state.mode == Mode::Riding {
            let (active, trigger) = overspeed_step(self.state.overspeed_active, fix.speed_kph, &self.cfg);
            self.state.overspeed_active = active;
            if let Some(trigger) = trigger {
                self.raise(t, trigger, out);
            }
        }
    }

    fn update_overtake(&mut self, t: Timestamp, out: &mut StepOutput) {
        let side = self.state.mag.vehicle_present(&self.cfg);
        let (status, trigger) = overtake_assist(self.state.overtake, self.state.collision.last_ttc_s, side, &self.cfg);
        self.state.overtake = status;
        if let Some(trigger) = trigger {
            self.raise(t, trigger, out);
        }
    }

    fn evaluate_preride(&mut self, t: Timestamp, out: &mut StepOutput) {
        let Some(start) = self.state.preride_start else {
            return;
        };
        if t.since(start) < PRERIDE_WINDOW_MS || self.state.preride_readings.is_empty() {
            return;
        }
        let readings = std::mem::take(&mut self.state.preride_readings);
        self.state.preride_start = None;
        // both checks have a non-empty window here
        let breath = breath_check(&readings, &self.cfg).unwrap_or(BreathResult::Pass);
        let leak = gas_leak_check(&readings, &self.cfg).unwrap_or(LeakResult::Safe);

        if breath == BreathResult::Pass && leak == LeakResult::Safe {
            if self.state.ignition_inhibited {
                self.state.ignition_inhibited = false;
                self.command(t, Action::IgnitionInhibit { on: false }, out);
            }
            self.end_ride();
            self.set_mode(t, Mode::Riding, out);
            return;
        }

        if !self.state.ignition_inhibited {
            self.state.ignition_inhibited = true;
            self.command(t, Action::IgnitionInhibit { on: true }, out);
        }
        if let BreathResult::Fail { peak_ppm } = breath {
            let trigger = Trigger::new(
                AlertKind::AlcoholLockout,
                format!("ALCOHOL LOCKOUT ethanol peak {peak_ppm:.1} ppm t={t}"),
            );
            self.raise(t, trigger, out);
        }
        if let LeakResult::Leak { peak_ppm } = leak {
            let trigger = Trigger::new(AlertKind::GasLeak, format!("GAS LEAK lpg peak {peak_ppm:.1} ppm t={t}"));
            self.raise(t, trigger, out);
        }
        self.set_mode(t, Mode::Parked, out);
    }

    /// Reset per-ride detector state.
    fn end_ride(&mut self) {
        self.state.preride_start = None;
        self.state.preride_readings.clear();
        self.state.overspeed_active = false;
        self.state.crash = CrashState::default();
        self.state.overtake = OvertakeStatus::Safe;
        self.state.collision = CollisionState::default();
    }

    fn unlock(&mut self, t: Timestamp, out: &mut StepOutput) {
        if self.state.solenoid_locked {
            self.state.solenoid_locked = false;
            self.command(t, Action::SolenoidLock { engaged: false }, out);
        }
    }

    fn raise(&mut self, t: Timestamp, trigger: Trigger, out: &mut StepOutput) {
        if let Some(routed) = self.state.router.route(&trigger, t, &self.cfg) {
            out.records.push(Record::Alert(routed.alert));
            out.records.extend(routed.commands.into_iter().map(Record::Command));
        }
    }

    fn command(&mut self, t: Timestamp, action: Action, out: &mut StepOutput) {
        out.records.push(Record::Command(ActuatorCommand { t, action }));
    }

    fn set_mode(&mut self, t: Timestamp, mode: Mode, out: &mut StepOutput) {
        if self.state.mode != mode {
            self.state.mode = mode;
            out.records.push(Record::ModeChange { t, mode });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AlertSeverity, GeoPoint};

    fn ev(t: u64, payload: SensorPayload) -> SensorEvent {
        SensorEvent::new(Timestamp(t), payload).unwrap()
    }

    fn gas(t: u64, ethanol: f64, lpg: f64) -> SensorEvent {
        ev(t, SensorPayload::GasReading(GasReading::new(ethanol, 0.0, lpg).unwrap()))
    }

    fn gps(t: u64, lat: f64, lon: f64, speed: f64) -> SensorEvent {
        let fix = GpsFix::new(GeoPoint::new(lat, lon).unwrap(), speed, true).unwrap();
        ev(t, SensorPayload::GpsFix(fix))
    }

    fn start(c: &mut Controller) -> StepOutput {
        c.step(
            Timestamp(0),
            &[
                ev(0, SensorPayload::Auth { authorized: true }),
                ev(0, SensorPayload::Ignition { on: true }),
            ],
        )
        .unwrap()
    }

    fn ride(c: &mut Controller) {
        start(c);
        for t in (0..=2000).step_by(500) {
            c.step(Timestamp(t), &[gas(t, 20.0, 100.0)]).unwrap();
        }
        assert_eq!(c.mode(), Mode::Riding);
    }

    #[test]
    fn authorized_start_enters_preride() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        let out = start(&mut c);
        assert_eq!(c.mode(), Mode::PreRide);
        assert_eq!(out.alerts().count(), 0);
        assert_eq!(out.mode_changes().collect::<Vec<_>>(), vec![Mode::PreRide]);
    }

    #[test]
    fn alcohol_lockout() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        start(&mut c);
        c.step(Timestamp(500), &[gas(500, 30.0, 0.0)]).unwrap();
        c.step(Timestamp(1000), &[gas(1000, 300.0, 0.0)]).unwrap();
        let out = c.step(Timestamp(2000), &[gas(2000, 35.0, 0.0)]).unwrap();
        assert_eq!(c.mode(), Mode::Parked);
        let cmds: Vec<_> = out.commands().map(|c| c.action.clone()).collect();
        assert_eq!(cmds[0], Action::IgnitionInhibit { on: true });
        let alerts: Vec<_> = out.alerts().collect();
        assert_eq!(alerts.len(), 1);
        assert_eq!(alerts[0].kind, AlertKind::AlcoholLockout);
        assert_eq!(alerts[0].severity, AlertSeverity::High);
        assert!(alerts[0].message.contains("300.0"));
    }

    #[test]
    fn gas_leak_blocks_ride() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        start(&mut c);
        let out = c.step(Timestamp(2000), &[gas(2000, 0.0, 1500.0)]).unwrap();
        assert_eq!(c.mode(), Mode::Parked);
        assert_eq!(out.alerts().map(|a| a.kind).collect::<Vec<_>>(), vec![AlertKind::GasLeak]);
    }

    #[test]
    fn preride_waits_for_window_and_readings() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        start(&mut c);
        c.step(Timestamp(1999), &[gas(1999, 0.0, 0.0)]).unwrap();
        assert_eq!(c.mode(), Mode::PreRide);
        c.step(Timestamp(2000), &[]).unwrap();
        assert_eq!(c.mode(), Mode::Riding);

        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        start(&mut c);
        c.step(Timestamp(5000), &[]).unwrap();
        assert_eq!(c.mode(), Mode::PreRide, "no readings, no ride");
    }

    #[test]
    fn retry_after_lockout_clears_inhibit() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        start(&mut c);
        c.step(Timestamp(2000), &[gas(2000, 200.0, 0.0)]).unwrap();
        assert!(c.state().ignition_inhibited);
        c.step(Timestamp(3000), &[ev(3000, SensorPayload::Ignition { on: true })]).unwrap();
        assert_eq!(c.mode(), Mode::PreRide);
        let out = c.step(Timestamp(5000), &[gas(5000, 20.0, 0.0)]).unwrap();
        assert_eq!(c.mode(), Mode::Riding);
        assert!(out.commands().any(|c| c.action == Action::IgnitionInhibit { on: false }));
    }

    #[test]
    fn unauthorized_ignition_locks() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        let out = c.step(Timestamp(10), &[ev(10, SensorPayload::Ignition { on: true })]).unwrap();
        let cmds: Vec<_> = out.commands().map(|c| c.action.clone()).collect();
        assert_eq!(cmds[0], Action::SolenoidLock { engaged: true });
        assert!(cmds
            .iter()
            .any(|a| matches!(a, Action::SmsSend { to, .. } if *to == c.config().owner_number)));
        let alert = out.alerts().next().unwrap();
        assert_eq!(alert.kind, AlertKind::Theft);
        assert_eq!(alert.severity, AlertSeverity::High);
        assert_eq!(c.mode(), Mode::TheftSuspected);

        let out = c.step(Timestamp(20), &[ev(20, SensorPayload::Auth { authorized: true })]).unwrap();
        assert_eq!(c.mode(), Mode::Parked);
        assert!(out.commands().any(|c| c.action == Action::SolenoidLock { engaged: false }));
    }

    #[test]
    fn crash_while_riding() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        c.step(Timestamp(2500), &[gps(2500, 14.5, 121.0, 0.0)]).unwrap();
        let mut crash = None;
        for t in (3000..=6000).step_by(100) {
            let out = c.step(Timestamp(t), &[ev(t, SensorPayload::Tilt { angle_deg: 75.0 })]).unwrap();
            if out.alerts().any(|a| a.kind == AlertKind::Crash) {
                crash = Some((t, out));
                break;
            }
        }
        let (t, out) = crash.expect("crash detected");
        assert_eq!(t, 6000);
        assert_eq!(c.mode(), Mode::CrashSuspected);
        let body = out
            .commands()
            .find_map(|c| match &c.action {
                Action::SmsSend { to, body } if *to == c_police() => Some(body.clone()),
                _ => None,
            })
            .unwrap();
        assert_eq!(body, "CRASH 14.500000,121.000000 t=6000");
    }

    fn c_police() -> String {
        ControllerConfig::default().police_number
    }

    #[test]
    fn lean_in_curve_is_not_a_crash() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        c.step(Timestamp(2500), &[gps(2500, 14.5, 121.0, 60.0)]).unwrap();
        for t in (3000..=20_000).step_by(100) {
            let out = c.step(Timestamp(t), &[ev(t, SensorPayload::Tilt { angle_deg: 45.0 })]).unwrap();
            assert_eq!(out.alerts().count(), 0);
        }
    }

    #[test]
    fn geofence_breach_while_parked() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        c.step(Timestamp(0), &[gps(0, 14.5995, 120.9842, 0.0)]).unwrap();
        assert!(c.state().theft.armed);
        let out = c.step(Timestamp(1000), &[gps(1000, 14.59995, 120.9842, 3.0)]).unwrap();
        assert_eq!(c.mode(), Mode::TheftSuspected);
        assert_eq!(out.alerts().next().unwrap().kind, AlertKind::Theft);
        // no lock on a breach, only on unauthorized ignition
        assert!(!out.commands().any(|c| matches!(c.action, Action::SolenoidLock { .. })));
    }

    #[test]
    fn ride_end_rearms_theft() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        c.step(Timestamp(3000), &[gps(3000, 10.0, 10.0, 30.0)]).unwrap();
        assert!(!c.state().theft.armed);
        c.step(Timestamp(4000), &[ev(4000, SensorPayload::Ignition { on: false })]).unwrap();
        assert_eq!(c.mode(), Mode::Parked);
        c.step(Timestamp(5000), &[gps(5000, 10.0, 10.0, 0.0)]).unwrap();
        assert!(c.state().theft.armed);
    }

    #[test]
    fn riding_never_beacons() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        for minute in 1..=300u64 {
            let t = minute * 60_000;
            let out = c.step(Timestamp(t), &[gps(t, 10.0, 10.0, 40.0)]).unwrap();
            assert!(out.alerts().all(|a| a.kind != AlertKind::Beacon));
        }
    }

    #[test]
    fn overspeed_once_per_excursion() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        let speeds = [70.0, 85.0, 90.0, 78.0, 86.0, 60.0, 95.0];
        let mut fired = Vec::new();
        for (i, s) in speeds.iter().enumerate() {
            let t = 3000 + i as u64 * 60_000;
            let out = c.step(Timestamp(t), &[gps(t, 10.0, 10.0, *s)]).unwrap();
            if out.alerts().any(|a| a.kind == AlertKind::Overspeed) {
                fired.push(i);
            }
        }
        assert_eq!(fired, vec![1, 6]);
    }

    #[test]
    fn vehicle_alongside_blocks_overtake() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        for i in 0..20u64 {
            let t = 2100 + i * 10;
            let out = c.step(Timestamp(t), &[ev(t, SensorPayload::MagField { b_ut: 50.0 })]).unwrap();
            assert!(out.records.is_empty());
        }
        let mut kinds = Vec::new();
        for i in 0..3u64 {
            let t = 3000 + i * 100;
            let out = c.step(Timestamp(t), &[ev(t, SensorPayload::MagField { b_ut: 62.0 })]).unwrap();
            kinds.extend(out.alerts().map(|a| a.kind));
        }
        assert_eq!(kinds, vec![AlertKind::VehicleProximity, AlertKind::OvertakeUnsafe]);
    }

    #[test]
    fn road_hazard_needs_speed() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        ride(&mut c);
        let out = c.step(Timestamp(3000), &[ev(3000, SensorPayload::PirMotion { detected: true })]).unwrap();
        assert_eq!(out.alerts().count(), 0);
        c.step(Timestamp(3100), &[gps(3100, 10.0, 10.0, 40.0)]).unwrap();
        let out = c.step(Timestamp(3200), &[ev(3200, SensorPayload::PirMotion { detected: true })]).unwrap();
        assert_eq!(out.alerts().next().unwrap().kind, AlertKind::RoadHazard);
    }

    #[test]
    fn undervoltage_is_low_diagnostic() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        let out = c.step(Timestamp(0), &[ev(0, SensorPayload::SupplyVoltage { volts: 18.0 })]).unwrap();
        let a = out.alerts().next().unwrap();
        assert_eq!((a.kind, a.severity), (AlertKind::LowVoltage, AlertSeverity::Low));
        assert_eq!(out.commands().count(), 0);
        assert_eq!(c.mode(), Mode::Parked);
        let out = c.step(Timestamp(1), &[ev(1, SensorPayload::SupplyVoltage { volts: 24.0 })]).unwrap();
        assert!(out.records.is_empty());
    }

    #[test]
    fn contract_violations() {
        let mut c = Controller::new(ControllerConfig::default()).unwrap();
        c.step(Timestamp(100), &[]).unwrap();
        assert!(c.step(Timestamp(99), &[]).is_err());
        assert!(c.step(Timestamp(200), &[ev(150, SensorPayload::Auth { authorized: true })]).is_err());
        let bad = SensorEvent {
            t: Timestamp(300),
            payload: SensorPayload::LidarRange { range_m: -3.0 },
        };
        assert!(c.step(Timestamp(300), &[bad]).is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = ControllerConfig {
            ttc_warn_s: 0.0,
            ..Default::default()
        };
        assert!(Controller::new(cfg).is_err());
    }
}
