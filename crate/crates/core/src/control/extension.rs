use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtensionConfig {
    /// Duty per degree.
    pub kp: f64,
    /// Duty per degree-second.
    pub ki: f64,
    /// Bend-sensor set point, degrees.
    pub reference_deg: f64,
    /// Full width of the error deadband, degrees.
    pub deadband_deg: f64,
    pub limit: f64,
    /// Time the reading must stay inside the deadband before the release
    /// is considered complete.
    pub settle_time: f64,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        Self {
            kp: 0.05,
            ki: 0.05,
            reference_deg: -20.0,
            deadband_deg: 8.0,
            limit: 0.85,
            settle_time: 0.2,
        }
    }
}

impl ExtensionConfig {
    pub fn deadband_halfwidth(&self) -> f64 {
        self.deadband_deg / 2.0
    }
}

/// PI controller on the bend-sensor angle with an error deadband.
///
/// The actuator flexes the fingers for positive duty while flexion lowers
/// the reading, so the command is the negated PI output. Outside the band
/// the error is measured from the band edge, which keeps the proportional
/// term continuous at the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionPi {
    kp: f64,
    ki: f64,
    reference: f64,
    halfwidth: f64,
    limit: f64,
    integrator: f64,
}

impl ExtensionPi {
    pub fn new(cfg: &ExtensionConfig) -> Self {
        Self {
            kp: cfg.kp,
            ki: cfg.ki,
            reference: cfg.reference_deg,
            halfwidth: cfg.deadband_halfwidth().abs(),
            limit: cfg.limit.abs().min(1.0),
            integrator: 0.0,
        }
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn deadband_halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn integrator(&self) -> f64 {
        self.integrator
    }

    pub fn in_deadband(&self, angle: f64) -> bool {
        (self.reference - angle).abs() <= self.halfwidth
    }

    pub fn reset(&mut self) {
        self.integrator = 0.0;
    }

    /// Signed duty; zero inside the deadband with the integrator frozen.
    pub fn step(&mut self, angle: f64, dt: f64) -> f64 {
        let error = self.reference - angle;
        if error.abs() <= self.halfwidth {
            return 0.0;
        }
        let e = error - self.halfwidth.copysign(error);
        let held = -(self.kp * e + self.ki * self.integrator);
        let candidate = self.integrator + e * dt;
        let integrated = -(self.kp * e + self.ki * candidate);
        // conditional integration: skip when it would push deeper into the limit
        if integrated.abs() <= self.limit || integrated.abs() < held.abs() {
            self.integrator = candidate;
        }
        (-(self.kp * e + self.ki * self.integrator)).clamp(-self.limit, self.limit)
    }
}
