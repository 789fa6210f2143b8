use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{ExtensionConfig, GraspConfig, Toggle};
use crate::detector::DetectorConfig;
use crate::plant::{DisturbanceWindow, PlantParams, SensorSimParams};
use crate::signal::{ChainConfig, MIN_SAMPLE_RATE};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

fn invalid(path: impl Into<String>, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default = "default_name")]
    pub name: String,
    /// s.
    pub duration: f64,
    /// Hz; also the plant and controller rate.
    #[serde(default = "default_rate")]
    pub sample_rate: f64,
    pub seed: u64,
    /// Flexion of every finger at t = 0, degrees.
    #[serde(default)]
    pub initial_flexion_deg: f64,
}

fn default_name() -> String {
    "scenario".to_string()
}

fn default_rate() -> f64 {
    crate::signal::DEFAULT_SAMPLE_RATE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSection {
    /// kg.
    pub mass: f64,
    pub friction_coefficient: f64,
    /// Flexion at which the fingers meet the surface, degrees.
    #[serde(default = "default_contact_angle")]
    pub contact_angle_deg: f64,
    /// Lever that turns an applied torque into tangential load, mm.
    #[serde(default = "default_torque_arm")]
    pub torque_arm: f64,
}

fn default_contact_angle() -> f64 {
    55.0
}

fn default_torque_arm() -> f64 {
    40.0
}

/// Time-tagged scenario event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Event {
    /// User switch moved to `position`; it stays there.
    Toggle { time: f64, position: Toggle },
    /// Support removed: the hand now carries the object.
    Lift { time: f64 },
    /// Object set back down on its support.
    Place { time: f64 },
    /// kg added to the object.
    AddMass { time: f64, mass: f64 },
    /// N mm of external torque added about the grasp.
    ApplyTorque { time: f64, torque: f64 },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Toggle { time, .. }
            | Event::Lift { time }
            | Event::Place { time }
            | Event::AddMass { time, .. }
            | Event::ApplyTorque { time, .. } => time,
        }
    }
}

/// Pass/fail thresholds evaluated on the run. Absent keys are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSection {
    pub min_duty_steps: Option<usize>,
    /// mm; the object counts as dropped beyond this.
    pub max_slip_mm: Option<f64>,
    pub final_bend_deg: Option<f64>,
    pub final_bend_tolerance: Option<f64>,
    pub max_slip_events: Option<usize>,
    /// Events with no object slip nearby.
    pub max_false_events: Option<usize>,
    pub max_duty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub object: Option<ObjectSection>,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub disturbances: Vec<DisturbanceWindow>,
    #[serde(default)]
    pub signal: ChainConfig,
    #[serde(default)]
    pub detector: DetectorConfig,
    #[serde(default)]
    pub grasp: GraspConfig,
    #[serde(default)]
    pub extension: ExtensionConfig,
    #[serde(default)]
    pub plant: PlantParams,
    #[serde(default)]
    pub sensor: SensorSimParams,
    #[serde(default)]
    pub checks: ChecksSection,
}

/// The bundled cup-and-tools scenario.
pub const CUP_TOML: &str = include_str!("../../configs/cup.toml");
/// No object, no disturbances, no toggle.
pub const EMPTY_TOML: &str = include_str!("../../configs/empty.toml");

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn cup() -> Self {
        Self::from_toml(CUP_TOML).expect("bundled cup config is valid")
    }

    pub fn empty() -> Self {
        Self::from_toml(EMPTY_TOML).expect("bundled empty config is valid")
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.scenario.sample_rate
    }

    pub fn steps(&self) -> usize {
        (self.scenario.duration * self.scenario.sample_rate).round() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        if !(s.duration.is_finite() && s.duration > 0.0) {
            return Err(invalid("scenario.duration", "must be positive"));
        }
        if !(s.sample_rate.is_finite() && s.sample_rate >= MIN_SAMPLE_RATE) {
            return Err(invalid("scenario.sample_rate", format!("must be at least {MIN_SAMPLE_RATE} Hz")));
        }
        if 1.0 / s.sample_rate > 0.01 {
            return Err(invalid("scenario.sample_rate", "plant step must not exceed 10 ms"));
        }
        if !(0.0..=90.0).contains(&s.initial_flexion_deg) {
            return Err(invalid("scenario.initial_flexion_deg", "must be within 0..90"));
        }
        if let Some(o) = &self.object {
            if !(o.mass.is_finite() && o.mass >= 0.0) {
                return Err(invalid("object.mass", "must be non-negative"));
            }
            if !(o.friction_coefficient.is_finite() && o.friction_coefficient >= 0.0) {
                return Err(invalid("object.friction_coefficient", "must be non-negative"));
            }
            if !(o.contact_angle_deg > 0.0 && o.contact_angle_deg <= 90.0) {
                return Err(invalid("object.contact_angle_deg", "must be within (0, 90]"));
            }
            if !(o.torque_arm.is_finite() && o.torque_arm > 0.0) {
                return Err(invalid("object.torque_arm", "must be positive"));
            }
        }
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.events.iter().enumerate() {
            let path = format!("events[{i}].time");
            let t = e.time();
            if !(t.is_finite() && t >= 0.0 && t <= s.duration) {
                return Err(invalid(path, "must lie within the scenario duration"));
            }
            if t < last {
                return Err(invalid(path, "events must be in time order"));
            }
            last = t;
            match e {
                Event::AddMass { mass, .. } if !(mass.is_finite() && *mass >= 0.0) => {
                    return Err(invalid(format!("events[{i}].mass"), "must be non-negative"));
                }
                Event::ApplyTorque { torque, .. } if !torque.is_finite() => {
                    return Err(invalid(format!("events[{i}].torque"), "must be finite"));
                }
                Event::Lift { .. } | Event::Place { .. } | Event::AddMass { .. } | Event::ApplyTorque { .. }
                    if self.object.is_none() =>
                {
                    return Err(invalid(format!("events[{i}]"), "object event without an [object] section"));
                }
                _ => {}
            }
        }
        for (i, w) in self.disturbances.iter().enumerate() {
            if !(w.start.is_finite() && w.end.is_finite() && w.start < w.end) {
                return Err(invalid(format!("disturbances[{i}]"), "need start < end"));
            }
        }
        if self.signal.gain.is_nan() {
            return Err(invalid("signal.gain", "must be a number"));
        }
        if let Some(hz) = self.signal.dc_block_hz {
            if !(hz > 0.0 && hz < s.sample_rate / 2.0) {
                return Err(invalid("signal.dc_block_hz", "must be within (0, fs/2)"));
            }
        }
        let d = &self.detector;
        if !(d.low_bound.is_finite() && d.high_bound.is_finite() && d.low_bound < d.high_bound) {
            return Err(invalid("detector.low_bound", "must be below detector.high_bound"));
        }
        if !(d.normalization.is_finite() && d.normalization > 0.0) {
            return Err(invalid("detector.normalization", "must be positive"));
        }
        let g = &self.grasp;
        if !(g.ki.is_finite() && g.ki >= 0.0) {
            return Err(invalid("grasp.ki", "must be non-negative"));
        }
        if !(g.saturation > 0.0 && g.saturation <= 0.85) {
            return Err(invalid("grasp.saturation", "must be within (0, 0.85]"));
        }
        if !(g.pre_contact_duty >= 0.0 && g.pre_contact_duty <= g.saturation) {
            return Err(invalid("grasp.pre_contact_duty", "must be within [0, grasp.saturation]"));
        }
        let x = &self.extension;
        for (name, v) in [("extension.kp", x.kp), ("extension.ki", x.ki), ("extension.deadband_deg", x.deadband_deg)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be non-negative"));
            }
        }
        if !(x.limit > 0.0 && x.limit <= 0.85) {
            return Err(invalid("extension.limit", "must be within (0, 0.85]"));
        }
        if !(x.settle_time.is_finite() && x.settle_time >= 0.0) {
            return Err(invalid("extension.settle_time", "must be non-negative"));
        }
        self.plant.validate().map_err(|e| match e {
            crate::plant::PlantError::InvalidParameter { name, reason, .. } => invalid(format!("plant.{name}"), reason),
            other => invalid("plant", other.to_string()),
        })?;
        let sp = &self.sensor;
        sp.pvdf.validate().map_err(|e| invalid("sensor.pvdf", e.to_string()))?;
        for (name, v) in [
            ("sensor.burst_gain", sp.burst_gain),
            ("sensor.burst_depth", sp.burst_depth),
            ("sensor.bend_noise", sp.bend_noise),
            ("sensor.desk_amplitude", sp.desk_amplitude),
            ("sensor.cable_drift_amplitude", sp.cable_drift_amplitude),
            ("sensor.cable_crackle_amplitude", sp.cable_crackle_amplitude),
            ("sensor.taper", sp.taper),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be non-negative"));
            }
        }
        for (name, [lo, hi]) in [
            ("sensor.burst_band_hz", sp.burst_band_hz),
            ("sensor.desk_band_hz", sp.desk_band_hz),
            ("sensor.cable_crackle_band_hz", sp.cable_crackle_band_hz),
        ] {
            if !(lo > 0.0 && hi > lo && hi < s.sample_rate / 2.0) {
                return Err(invalid(name, "need 0 < low < high < fs/2"));
            }
        }
        if let (Some(_), None) | (None, Some(_)) = (self.checks.final_bend_deg, self.checks.final_bend_tolerance) {
            return Err(invalid("checks.final_bend_tolerance", "final_bend_deg and final_bend_tolerance go together"));
        }
        Ok(())
    }
}
