use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraspConfig {
    /// Duty fraction per (V^2 s).
    pub ki: f64,
    pub saturation: f64,
    /// Constant duty used while closing, before first contact.
    pub pre_contact_duty: f64,
}

impl Default for GraspConfig {
    fn default() -> Self {
        // 10 V^2 sustained for 50 ms adds 0.1 duty.
        Self {
            ki: 0.2,
            saturation: 0.85,
            pre_contact_duty: 0.30,
        }
    }
}

/// Integral controller on slip-gated power. The set point is zero power,
/// so the error is the power itself and duty grows with it.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspIntegrator {
    ki: f64,
    saturation: f64,
    pre_contact_duty: f64,
    integrator: f64,
}

impl GraspIntegrator {
    pub fn new(cfg: &GraspConfig) -> Self {
        let saturation = cfg.saturation.clamp(0.0, 1.0);
        Self {
            ki: cfg.ki,
            saturation,
            pre_contact_duty: cfg.pre_contact_duty.clamp(0.0, saturation),
            integrator: 0.0,
        }
    }

    pub fn duty(&self) -> f64 {
        self.integrator
    }

    pub fn saturation(&self) -> f64 {
        self.saturation
    }

    pub fn pre_contact_duty(&self) -> f64 {
        self.pre_contact_duty
    }

    /// Updates only while slip is active. Clamping stops windup at the
    /// saturation limit.
    pub fn step(&mut self, slip_active: bool, power: f64, dt: f64) -> f64 {
        if slip_active && power > 0.0 && dt > 0.0 {
            self.integrator = (self.integrator + self.ki * power * dt).clamp(0.0, self.saturation);
        }
        self.integrator
    }

    pub fn reset(&mut self) {
        self.integrator = 0.0;
    }

    /// Seeds the integrator with the closing duty so the hand keeps its
    /// squeeze when control hands over on contact.
    pub fn preload(&mut self) {
        self.integrator = self.integrator.max(self.pre_contact_duty);
    }
}

/// Value-returning form of [`GraspIntegrator::reset`].
pub fn reset_grasp(mut ctrl: GraspIntegrator) -> GraspIntegrator {
    ctrl.reset();
    ctrl
}
