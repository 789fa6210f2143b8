use serde::{Deserialize, Serialize};

use super::{DisturbanceKind, DisturbanceWindow, ObjectState, PvdfSim, SensorSimParams};
use crate::signal::{SignalError, TimeSeries, Unit};

/// Ground-truth slip interval with constant slip speed and normal force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlipBurst {
    pub start: f64,
    pub end: f64,
    /// mm/s.
    pub slip_velocity: f64,
    /// N.
    pub normal_force: f64,
}

/// Open-loop PVDF recording with labelled slip bursts and disturbances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTrace {
    pub duration: f64,
    pub sample_rate: f64,
    pub seed: u64,
    pub bursts: Vec<SlipBurst>,
    pub disturbances: Vec<DisturbanceWindow>,
    pub sensor: SensorSimParams,
}

impl SyntheticTrace {
    /// Three slip bursts separated by two cable-drift segments, 14 s.
    pub fn demo(seed: u64) -> Self {
        let burst = |start: f64, end: f64, v: f64| SlipBurst {
            start,
            end,
            slip_velocity: v,
            normal_force: 2.0,
        };
        Self {
            duration: 14.0,
            sample_rate: 1000.0,
            seed,
            bursts: vec![burst(1.0, 1.4, 4.0), burst(5.5, 5.8, 6.0), burst(10.0, 10.6, 3.0)],
            disturbances: vec![
                DisturbanceWindow {
                    kind: DisturbanceKind::Cable,
                    start: 2.5,
                    end: 4.0,
                },
                DisturbanceWindow {
                    kind: DisturbanceKind::Cable,
                    start: 7.0,
                    end: 8.5,
                },
            ],
            sensor: SensorSimParams::default(),
        }
    }

    pub fn len(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Raw PVDF voltage.
    pub fn generate(&self) -> Result<TimeSeries, SignalError> {
        let dt = 1.0 / self.sample_rate;
        let mut sim = PvdfSim::new(&self.sensor, &self.disturbances, self.sample_rate, self.seed)?;
        let mut object = ObjectState::none();
        let values = (0..self.len())
            .map(|k| {
                let t = k as f64 * dt;
                let active = self.bursts.iter().find(|b| t >= b.start && t < b.end);
                object.slip_velocity = active.map_or(0.0, |b| b.slip_velocity);
                object.normal_force = active.map_or(0.0, |b| b.normal_force);
                sim.sample(&object, t)
            })
            .collect();
        TimeSeries::new(0.0, dt, values, Unit::Volts)
    }
}
