use serde::{Deserialize, Serialize};

use super::{SignalError, TimeSeries, Unit};

/// Electrical parameters of the PVDF strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvdfParams {
    /// Farads.
    pub capacitance: f64,
    /// Coulombs per newton.
    pub charge_constant: f64,
    /// RMS of the sensor noise floor in volts.
    pub noise_floor: f64,
    /// Electrode discharge time constant in seconds. `None` disables leakage.
    pub leakage_tau: Option<f64>,
}

impl Default for PvdfParams {
    fn default() -> Self {
        Self {
            capacitance: 1e-9,
            charge_constant: 25e-12,
            noise_floor: 0.005,
            leakage_tau: Some(0.5),
        }
    }
}

impl PvdfParams {
    pub fn validate(&self) -> Result<(), SignalError> {
        if !(self.capacitance.is_finite() && self.capacitance > 0.0) {
            return Err(SignalError::InvalidParameter {
                name: "capacitance",
                value: self.capacitance,
                reason: "must be positive",
            });
        }
        if !(self.charge_constant.is_finite() && self.charge_constant > 0.0) {
            return Err(SignalError::InvalidParameter {
                name: "charge_constant",
                value: self.charge_constant,
                reason: "must be positive",
            });
        }
        if !(self.noise_floor.is_finite() && self.noise_floor >= 0.0) {
            return Err(SignalError::InvalidParameter {
                name: "noise_floor",
                value: self.noise_floor,
                reason: "must be non-negative",
            });
        }
        if let Some(tau) = self.leakage_tau {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(SignalError::InvalidParameter {
                    name: "leakage_tau",
                    value: tau,
                    reason: "must be positive",
                });
            }
        }
        Ok(())
    }

    /// Volts per newton of force change, d / C_p.
    pub fn sensitivity(&self) -> f64 {
        self.charge_constant / self.capacitance
    }
}

/// V = Q / C_p.
pub fn charge_voltage(charge: f64, params: &PvdfParams) -> Result<f64, SignalError> {
    params.validate()?;
    Ok(charge / params.capacitance)
}

/// Streaming charge model. Each force increment deposits `d * dF` on the
/// electrodes; the stored charge bleeds off with the leakage time constant.
///
/// The force before the first sample is taken equal to the first sample, so
/// a series that starts under load produces no spurious step.
#[derive(Debug, Clone)]
pub struct PvdfSensor {
    sensitivity: f64,
    decay: f64,
    prev_force: Option<f64>,
    voltage: f64,
}

impl PvdfSensor {
    pub fn new(params: &PvdfParams, dt: f64) -> Result<Self, SignalError> {
        params.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SignalError::InvalidInterval(dt));
        }
        let decay = params.leakage_tau.map_or(1.0, |tau| (-dt / tau).exp());
        Ok(Self {
            sensitivity: params.sensitivity(),
            decay,
            prev_force: None,
            voltage: 0.0,
        })
    }

    pub fn step(&mut self, force: f64) -> f64 {
        let prev = self.prev_force.unwrap_or(force);
        self.voltage = self.voltage * self.decay + self.sensitivity * (force - prev);
        self.prev_force = Some(force);
        self.voltage
    }

    pub fn reset(&mut self) {
        self.prev_force = None;
        self.voltage = 0.0;
    }
}

/// Converts a force record into the open-circuit PVDF voltage.
pub fn charge_to_voltage(force: &TimeSeries, params: &PvdfParams) -> Result<TimeSeries, SignalError> {
    let mut sensor = PvdfSensor::new(params, force.dt())?;
    let out = force.values().iter().map(|&f| sensor.step(f)).collect();
    Ok(force.with_values(out, Unit::Volts))
}
