use crate::config::ControllerConfig;
use crate::types::{ContractViolation, GasReading};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreathResult {
    Pass,
    Fail { peak_ppm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeakResult {
    Safe,
    Leak { peak_ppm: f64 },
}

fn peak(readings: &[GasReading], pick: impl Fn(&GasReading) -> f64) -> Result<f64, ContractViolation> {
    readings
        .iter()
        .map(pick)
        .reduce(f64::max)
        .ok_or_else(|| ContractViolation("gas window is empty".into()))
}

/// Breath alcohol check over a window. The lockout level is inclusive.
pub fn breath_check(readings: &[GasReading], cfg: &ControllerConfig) -> Result<BreathResult, ContractViolation> {
    let peak_ppm = peak(readings, |g| g.ethanol_ppm)?;
    Ok(if peak_ppm >= cfg.ethanol_lockout_ppm {
        BreathResult::Fail { peak_ppm }
    } else {
        BreathResult::Pass
    })
}

/// LPG-class leak check over a window. The leak level is inclusive.
pub fn gas_leak_check(readings: &[GasReading], cfg: &ControllerConfig) -> Result<LeakResult, ContractViolation> {
    let peak_ppm = peak(readings, |g| g.lpg_ppm)?;
    Ok(if peak_ppm >= cfg.lpg_leak_ppm {
        LeakResult::Leak { peak_ppm }
    } else {
        LeakResult::Safe
    })
}
