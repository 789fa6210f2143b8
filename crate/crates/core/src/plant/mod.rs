//! Quasi-static model of the single-actuated, cable-driven hand.
//!
//! A slider travelling along the palm pulls one cable per finger. Each
//! cable is a linear spring `k = E A / L` between the slider and a finger
//! pulley of radius `r`; a preloaded elastic band on the dorsal side holds
//! each finger open. For slider position `x` a free finger settles where
//!
//! ```text
//! k (x - r θ) r = k_b θ + τ_0        (θ > 0)
//! ```
//!
//! and stays at θ = 0 while `k r x ≤ τ_0`. Fingers stop at the object
//! surface or their joint limit; the excess cable torque then presses on the
//! object. The slider is first order: motor force minus cable tension,
//! less Coulomb friction, over a viscous damping constant.

mod sensors;
mod sweep;
mod synthetic;

pub use sensors::{
    bend_angle, BandNoise, BendSensor, DisturbanceKind, DisturbanceWindow, PvdfSim, SensorSimParams,
};
pub use sweep::{adaptive_sweep, log_spaced, SweepRow};
pub use synthetic::{SlipBurst, SyntheticTrace};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlantError {
    #[error("simulation fault at slider {slider_mm} mm: non-finite {field}")]
    NonFinite { field: &'static str, slider_mm: f64 },
    #[error("invalid plant parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("duty {0} outside [-0.85, 0.85]")]
    DutyOutOfRange(f64),
    #[error("step {0} s outside (0, 0.01]")]
    StepOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finger {
    Index,
    Middle,
    Ring,
    Little,
    Thumb,
}

impl Finger {
    pub const ALL: [Finger; 5] = [Finger::Index, Finger::Middle, Finger::Ring, Finger::Little, Finger::Thumb];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Largest duty magnitude the plant accepts.
pub const MAX_DUTY: f64 = 0.85;
const MAX_DT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CableParams {
    /// N/mm^2.
    pub youngs_modulus: f64,
    /// mm^2.
    pub cross_section_area: f64,
    /// mm.
    pub free_length: f64,
}

impl Default for CableParams {
    /// 0.5 mm nylon monofilament.
    fn default() -> Self {
        Self {
            youngs_modulus: 2100.0,
            cross_section_area: 0.196,
            free_length: 150.0,
        }
    }
}

impl CableParams {
    /// N/mm.
    pub fn stiffness(&self) -> f64 {
        self.youngs_modulus * self.cross_section_area / self.free_length
    }
}

/// Mechanism constants. Defaults are calibrated so the blocked-middle-finger
/// sweep puts 3..10 mm of slider travel near E = 1125..3000 N/mm^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantParams {
    pub cable: CableParams,
    /// Cable moment arm at the finger, mm.
    pub moment_arm: f64,
    /// Elastic band stiffness, N mm / rad.
    pub band_stiffness: f64,
    /// Elastic band preload torque at the open stop, N mm.
    pub band_preload: f64,
    pub joint_limit_deg: f64,
    /// Distance from joint to the contact point, mm.
    pub contact_lever: f64,
    /// Slider force at duty 1, N.
    pub stall_force: f64,
    /// N s / mm.
    pub slider_damping: f64,
    /// Coulomb friction on the slider, N.
    pub slider_friction: f64,
    /// mm.
    pub max_travel: f64,
    /// Viscous resistance of the sliding contact, N s / mm.
    pub slip_damping: f64,
    /// m / s^2.
    pub gravity: f64,
    /// Constant slider force used by the elasticity sweep, N.
    pub sweep_force: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            cable: CableParams::default(),
            moment_arm: 10.0,
            band_stiffness: 10.0,
            band_preload: 20.0,
            joint_limit_deg: 90.0,
            contact_lever: 40.0,
            stall_force: 120.0,
            slider_damping: 0.1,
            slider_friction: 14.0,
            max_travel: 25.0,
            slip_damping: 0.3,
            gravity: 9.81,
            sweep_force: 37.4,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        let positive: [(&'static str, f64); 11] = [
            ("cable.youngs_modulus", self.cable.youngs_modulus),
            ("cable.cross_section_area", self.cable.cross_section_area),
            ("cable.free_length", self.cable.free_length),
            ("moment_arm", self.moment_arm),
            ("joint_limit_deg", self.joint_limit_deg),
            ("contact_lever", self.contact_lever),
            ("stall_force", self.stall_force),
            ("slider_damping", self.slider_damping),
            ("max_travel", self.max_travel),
            ("slip_damping", self.slip_damping),
            ("gravity", self.gravity),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(PlantError::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
        }
        let non_negative: [(&'static str, f64); 4] = [
            ("band_stiffness", self.band_stiffness),
            ("band_preload", self.band_preload),
            ("slider_friction", self.slider_friction),
            ("sweep_force", self.sweep_force),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(PlantError::InvalidParameter {
                    name,
                    value,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandPlantState {
    /// mm in [0, max_travel].
    pub slider_position: f64,
    /// mm/s over the last step.
    pub slider_velocity: f64,
    /// Flexion per finger, degrees; 0 is flat.
    pub finger_angles: [f64; 5],
    /// N, never negative.
    pub cable_tensions: [f64; 5],
    /// N mm.
    pub elastic_band_torque: [f64; 5],
    /// Normal force each finger applies to the object, N.
    pub contact_forces: [f64; 5],
    pub contact: [bool; 5],
}

impl HandPlantState {
    pub fn angle(&self, f: Finger) -> f64 {
        self.finger_angles[f.index()]
    }

    pub fn total_tension(&self) -> f64 {
        self.cable_tensions.iter().sum()
    }
}

/// Grasped object and its stick-slip contact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    /// No object at all when false.
    pub present: bool,
    /// Weight carried by something other than the hand (table, user).
    pub supported: bool,
    /// kg.
    pub mass: f64,
    pub friction_coefficient: f64,
    /// Flexion at which every finger meets the object surface, degrees.
    pub contact_angle_deg: f64,
    /// mm, converts an external torque into tangential load.
    pub torque_arm: f64,
    /// N mm.
    pub external_torque: f64,
    /// N.
    pub normal_force: f64,
    /// N.
    pub tangential_load: f64,
    /// mm.
    pub slip_displacement: f64,
    /// mm/s.
    pub slip_velocity: f64,
}

impl ObjectState {
    pub fn none() -> Self {
        Self {
            present: false,
            supported: true,
            mass: 0.0,
            friction_coefficient: 0.0,
            contact_angle_deg: 0.0,
            torque_arm: 1.0,
            external_torque: 0.0,
            normal_force: 0.0,
            tangential_load: 0.0,
            slip_displacement: 0.0,
            slip_velocity: 0.0,
        }
    }

    /// Object resting on a support, not yet touched.
    pub fn resting(mass: f64, friction_coefficient: f64, contact_angle_deg: f64, torque_arm: f64) -> Self {
        Self {
            present: true,
            supported: true,
            mass,
            friction_coefficient,
            contact_angle_deg,
            torque_arm,
            ..Self::none()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct FingerPose {
    theta: f64,
    tension: f64,
    band_torque: f64,
    reaction: f64,
    blocked: bool,
}

/// Plant parameters plus optional per-finger blocks.
#[derive(Debug, Clone)]
pub struct HandPlant {
    params: PlantParams,
    blocked: [Option<f64>; 5],
}

impl HandPlant {
    pub fn new(params: PlantParams) -> Result<Self, PlantError> {
        params.validate()?;
        Ok(Self {
            params,
            blocked: [None; 5],
        })
    }

    pub fn params(&self) -> &PlantParams {
        &self.params
    }

    /// Pins a finger at `angle_deg` regardless of cable tension.
    pub fn block(&mut self, finger: Finger, angle_deg: f64) {
        self.blocked[finger.index()] = Some(angle_deg.to_radians());
    }

    fn free_angle(&self, x: f64) -> f64 {
        let p = &self.params;
        let k = p.cable.stiffness();
        let r = p.moment_arm;
        let drive = k * r * x - p.band_preload;
        if drive <= 0.0 {
            0.0
        } else {
            drive / (p.band_stiffness + k * r * r)
        }
    }

    fn pose(&self, x: f64, finger: usize, object: &ObjectState) -> FingerPose {
        let p = &self.params;
        let k = p.cable.stiffness();
        let r = p.moment_arm;
        let free = self.free_angle(x);
        let (theta, blocked) = match self.blocked[finger] {
            Some(b) => (b, true),
            None => {
                let mut stop = p.joint_limit_deg.to_radians();
                if object.present {
                    stop = stop.min(object.contact_angle_deg.to_radians());
                }
                if free > stop {
                    (stop, true)
                } else {
                    (free, false)
                }
            }
        };
        let tension = k * (x - r * theta).max(0.0);
        let band_torque = p.band_stiffness * theta + p.band_preload;
        let reaction = if blocked {
            (tension * r - band_torque).max(0.0)
        } else {
            0.0
        };
        FingerPose {
            theta,
            tension,
            band_torque,
            reaction,
            blocked,
        }
    }

    fn contact_angle_ok(&self, finger: usize, theta: f64, object: &ObjectState) -> bool {
        object.present
            && self.blocked[finger].is_none()
            && (theta - object.contact_angle_deg.to_radians()).abs() < 1e-12
            && object.contact_angle_deg < self.params.joint_limit_deg
    }

    /// Posture of all fingers with the slider held at `x`.
    pub fn posture(&self, x: f64, object: &ObjectState) -> HandPlantState {
        let x = x.clamp(0.0, self.params.max_travel);
        let mut s = HandPlantState {
            slider_position: x,
            slider_velocity: 0.0,
            finger_angles: [0.0; 5],
            cable_tensions: [0.0; 5],
            elastic_band_torque: [0.0; 5],
            contact_forces: [0.0; 5],
            contact: [false; 5],
        };
        for i in 0..5 {
            let pose = self.pose(x, i, object);
            s.finger_angles[i] = pose.theta.to_degrees();
            s.cable_tensions[i] = pose.tension;
            s.elastic_band_torque[i] = pose.band_torque;
            let touching = pose.blocked && self.contact_angle_ok(i, pose.theta, object);
            s.contact[i] = touching;
            if touching {
                s.contact_forces[i] = pose.reaction / self.params.contact_lever;
            }
        }
        s
    }

    /// Slider position at which free fingers sit at `angle_deg`.
    pub fn slider_for_angle(&self, angle_deg: f64) -> f64 {
        let p = &self.params;
        let k = p.cable.stiffness();
        let r = p.moment_arm;
        let theta = angle_deg.max(0.0).to_radians();
        if theta == 0.0 {
            return 0.0;
        }
        ((theta * (p.band_stiffness + k * r * r) + p.band_preload) / (k * r)).min(p.max_travel)
    }

    /// Hand at rest with free fingers flexed to `angle_deg`.
    pub fn rest_state(&self, angle_deg: f64) -> HandPlantState {
        self.posture(self.slider_for_angle(angle_deg), &ObjectState::none())
    }

    /// Advances one step with the motor at `duty`.
    pub fn step(
        &self,
        state: &HandPlantState,
        object: &ObjectState,
        duty: f64,
        dt: f64,
    ) -> Result<(HandPlantState, ObjectState), PlantError> {
        if duty.is_nan() || duty.abs() > MAX_DUTY + 1e-12 {
            return Err(PlantError::DutyOutOfRange(duty));
        }
        self.step_force(state, object, duty * self.params.stall_force, dt)
    }

    /// Advances one step with a prescribed slider force in newtons.
    pub fn step_force(
        &self,
        state: &HandPlantState,
        object: &ObjectState,
        force: f64,
        dt: f64,
    ) -> Result<(HandPlantState, ObjectState), PlantError> {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return Err(PlantError::StepOutOfRange(dt));
        }
        let p = &self.params;
        let x = state.slider_position;
        if !x.is_finite() || !force.is_finite() {
            return Err(PlantError::NonFinite {
                field: if x.is_finite() { "force" } else { "slider_position" },
                slider_mm: x,
            });
        }
        let current = self.posture(x, object);
        let net = force - current.total_tension();
        let v = if net.abs() <= p.slider_friction {
            0.0
        } else {
            (net - p.slider_friction.copysign(net)) / p.slider_damping
        };
        let x_next = (x + v * dt).clamp(0.0, p.max_travel);
        let mut next = self.posture(x_next, object);
        next.slider_velocity = (x_next - x) / dt;

        let mut obj = object.clone();
        obj.normal_force = next.contact_forces.iter().sum();
        if obj.present && !obj.supported {
            obj.tangential_load = obj.mass * p.gravity + obj.external_torque / obj.torque_arm;
            let excess = obj.tangential_load - obj.friction_coefficient * obj.normal_force;
            obj.slip_velocity = if excess > 0.0 { excess / p.slip_damping } else { 0.0 };
        } else {
            obj.tangential_load = 0.0;
            obj.slip_velocity = 0.0;
        }
        obj.slip_displacement += obj.slip_velocity * dt;

        let finite = next.finger_angles.iter().chain(&next.cable_tensions).all(|v| v.is_finite())
            && next.slider_velocity.is_finite();
        if !finite {
            return Err(PlantError::NonFinite {
                field: "posture",
                slider_mm: x_next,
            });
        }
        if !(obj.slip_displacement.is_finite() && obj.normal_force.is_finite()) {
            return Err(PlantError::NonFinite {
                field: "object",
                slider_mm: x_next,
            });
        }
        Ok((next, obj))
    }
}

/// Free-function form of [`HandPlant::step`].
pub fn plant_step(
    plant: &HandPlant,
    state: &HandPlantState,
    object: &ObjectState,
    duty: f64,
    dt: f64,
) -> Result<(HandPlantState, ObjectState), PlantError> {
    plant.step(state, object, duty, dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plant() -> HandPlant {
        HandPlant::new(PlantParams::default()).unwrap()
    }

    #[test]
    fn zero_duty_at_rest_is_equilibrium() {
        let p = plant();
        for angle in [0.0, 20.0] {
            let s0 = p.rest_state(angle);
            let obj = ObjectState::none();
            let (s1, o1) = p.step(&s0, &obj, 0.0, 1e-3).unwrap();
            assert_eq!(s1.slider_position, s0.slider_position);
            assert_eq!(s1.finger_angles, s0.finger_angles);
            assert_eq!(o1.slip_velocity, 0.0);
        }
        let s = p.rest_state(20.0);
        assert!((s.angle(Finger::Little) - 20.0).abs() < 1e-9);
    }

    #[test]
    fn positive_duty_closes_monotonically() {
        let p = plant();
        let mut s = p.rest_state(0.0);
        let obj = ObjectState::none();
        let mut prev = s.clone();
        for _ in 0..3000 {
            let (n, _) = p.step(&s, &obj, 0.5, 1e-3).unwrap();
            assert!(n.slider_position >= prev.slider_position);
            for f in 0..5 {
                assert!(n.finger_angles[f] >= prev.finger_angles[f] - 1e-12);
            }
            prev = n.clone();
            s = n;
        }
        assert!(s.angle(Finger::Index) > 60.0);
        assert!(s.slider_position <= 25.0);
    }

    #[test]
    fn tensions_non_negative_and_travel_bounded() {
        let p = plant();
        let obj = ObjectState::none();
        let mut s = p.rest_state(0.0);
        for k in 0..20_000 {
            let duty = 0.85 * ((k as f64) * 0.003).sin();
            let (n, _) = p.step(&s, &obj, duty, 1e-3).unwrap();
            assert!(n.cable_tensions.iter().all(|&t| t >= 0.0));
            assert!((0.0..=25.0).contains(&n.slider_position));
            s = n;
        }
    }

    #[test]
    fn relaxes_toward_neutral_without_drive() {
        let p = plant();
        let obj = ObjectState::none();
        let mut s = p.rest_state(80.0);
        let start = s.angle(Finger::Little);
        for _ in 0..5000 {
            let (n, _) = p.step(&s, &obj, 0.0, 1e-3).unwrap();
            assert!(n.angle(Finger::Little) <= s.angle(Finger::Little) + 1e-12);
            s = n;
        }
        let end = s.angle(Finger::Little);
        assert!(end < start - 20.0, "{start} -> {end}");
        // friction stalls the passive return part way
        assert!(end > 20.0 && end < 60.0, "{end}");
    }

    #[test]
    fn stick_when_friction_suffices() {
        let p = plant();
        let mut obj = ObjectState::resting(0.06, 0.5, 55.0, 40.0);
        let mut s = p.rest_state(20.0);
        for _ in 0..3000 {
            let (n, o) = p.step(&s, &obj, 0.3, 1e-3).unwrap();
            s = n;
            obj = o;
        }
        assert!(s.contact[Finger::Index.index()]);
        obj.supported = false;
        let (_, o) = p.step(&s, &obj, 0.3, 1e-3).unwrap();
        assert!(o.tangential_load <= o.friction_coefficient * o.normal_force);
        assert_eq!(o.slip_velocity, 0.0);

        obj.mass = 1.0;
        let (_, o) = p.step(&s, &obj, 0.3, 1e-3).unwrap();
        assert!(o.tangential_load > o.friction_coefficient * o.normal_force);
        assert!(o.slip_velocity > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = plant();
        let s = p.rest_state(0.0);
        let o = ObjectState::none();
        assert!(matches!(p.step(&s, &o, 0.9, 1e-3), Err(PlantError::DutyOutOfRange(_))));
        assert!(matches!(p.step(&s, &o, 0.1, 0.02), Err(PlantError::StepOutOfRange(_))));
        let mut bad = s.clone();
        bad.slider_position = f64::NAN;
        assert!(matches!(p.step(&bad, &o, 0.1, 1e-3), Err(PlantError::NonFinite { .. })));
        let mut params = PlantParams::default();
        params.cable.youngs_modulus = -1.0;
        assert!(HandPlant::new(params).is_err());
    }
}
