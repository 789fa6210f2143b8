use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Finger, HandPlantState, ObjectState};
use crate::signal::{bilinear, ContinuousTf, DiscreteFilter, PvdfParams, SignalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceKind {
    /// Vibration coupled in from the table top.
    Desk,
    /// Sensor lead being moved: slow drift plus crackle.
    Cable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceWindow {
    pub kind: DisturbanceKind,
    pub start: f64,
    pub end: f64,
}

impl DisturbanceWindow {
    /// Raised-cosine envelope with `taper` seconds on each side.
    pub fn envelope(&self, t: f64, taper: f64) -> f64 {
        if t < self.start || t > self.end {
            return 0.0;
        }
        if taper <= 0.0 {
            return 1.0;
        }
        let ramp = ((t - self.start) / taper).min((self.end - t) / taper).min(1.0);
        0.5 * (1.0 - (PI * ramp).cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSimParams {
    pub pvdf: PvdfParams,
    /// V per (mm/s * N) of slip.
    pub burst_gain: f64,
    pub burst_band_hz: [f64; 2],
    /// Relative depth of the texture modulation on the slip envelope.
    pub burst_depth: f64,
    /// Bend-sensor noise, degrees RMS.
    pub bend_noise: f64,
    /// V RMS.
    pub desk_amplitude: f64,
    pub desk_band_hz: [f64; 2],
    /// V peak.
    pub cable_drift_amplitude: f64,
    pub cable_drift_hz: f64,
    /// V RMS.
    pub cable_crackle_amplitude: f64,
    pub cable_crackle_band_hz: [f64; 2],
    /// Fade in and out of each disturbance window, s.
    pub taper: f64,
}

impl Default for SensorSimParams {
    fn default() -> Self {
        Self {
            pvdf: PvdfParams::default(),
            burst_gain: 0.1,
            burst_band_hz: [50.0, 400.0],
            burst_depth: 0.5,
            bend_noise: 0.2,
            desk_amplitude: 1.5,
            desk_band_hz: [150.0, 400.0],
            cable_drift_amplitude: 0.15,
            cable_drift_hz: 1.0,
            cable_crackle_amplitude: 1.5,
            cable_crackle_band_hz: [80.0, 300.0],
            taper: 0.05,
        }
    }
}

/// Unit-variance band-limited Gaussian noise.
#[derive(Debug, Clone)]
pub struct BandNoise {
    filter: DiscreteFilter,
    scale: f64,
}

impl BandNoise {
    /// Second-order bandpass between `lo` and `hi` Hz.
    pub fn new(lo: f64, hi: f64, fs: f64) -> Result<Self, SignalError> {
        let nyq = fs / 2.0;
        if !(lo > 0.0 && hi > lo && hi < nyq) {
            return Err(SignalError::InvalidParameter {
                name: "band",
                value: hi,
                reason: "need 0 < lo < hi < fs/2",
            });
        }
        let w0 = 2.0 * PI * (lo * hi).sqrt();
        let bw = 2.0 * PI * (hi - lo);
        let tf = ContinuousTf::new(vec![bw, 0.0], vec![1.0, bw, w0 * w0])?;
        let mut filter = bilinear(&tf, fs)?;
        let mut energy = 0.0;
        let mut x = 1.0;
        for _ in 0..(fs as usize * 4).max(4096) {
            let y = filter.step(x);
            energy += y * y;
            x = 0.0;
        }
        filter.reset();
        Ok(Self {
            filter,
            scale: 1.0 / energy.sqrt(),
        })
    }

    pub fn step(&mut self, white: f64) -> f64 {
        self.filter.step(white) * self.scale
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Synthesises the raw PVDF voltage from the contact state.
///
/// Slip produces a positive envelope proportional to slip speed times normal
/// force, textured by band noise. Disturbances are oscillatory and sit above
/// the integrator-lead filter's corner, apart from a small cable drift.
#[derive(Debug, Clone)]
pub struct PvdfSim {
    params: SensorSimParams,
    windows: Vec<DisturbanceWindow>,
    rng: ChaCha8Rng,
    slip_noise: BandNoise,
    desk_noise: BandNoise,
    crackle_noise: BandNoise,
}

impl PvdfSim {
    pub fn new(params: &SensorSimParams, windows: &[DisturbanceWindow], fs: f64, seed: u64) -> Result<Self, SignalError> {
        params.pvdf.validate()?;
        let [sl, sh] = params.burst_band_hz;
        let [dl, dh] = params.desk_band_hz;
        let [cl, ch] = params.cable_crackle_band_hz;
        Ok(Self {
            params: *params,
            windows: windows.to_vec(),
            rng: rng_for(seed, 1),
            slip_noise: BandNoise::new(sl, sh, fs)?,
            desk_noise: BandNoise::new(dl, dh, fs)?,
            crackle_noise: BandNoise::new(cl, ch, fs)?,
        })
    }

    fn envelope(&self, kind: DisturbanceKind, t: f64) -> f64 {
        self.windows
            .iter()
            .filter(|w| w.kind == kind)
            .map(|w| w.envelope(t, self.params.taper))
            .fold(0.0, f64::max)
    }

    /// Raw voltage at time `t`. Draws the same number of random values on
    /// every call so the stream stays aligned across scenarios.
    pub fn sample(&mut self, object: &ObjectState, t: f64) -> f64 {
        let p = &self.params;
        let n_slip = self.slip_noise.step(self.rng.sample(StandardNormal));
        let n_desk = self.desk_noise.step(self.rng.sample(StandardNormal));
        let n_crackle = self.crackle_noise.step(self.rng.sample(StandardNormal));
        let floor: f64 = self.rng.gen_range(-1.0..1.0);

        let slip = if object.slip_velocity > 0.0 && object.normal_force > 0.0 {
            p.burst_gain * object.slip_velocity * object.normal_force * (1.0 + p.burst_depth * n_slip)
        } else {
            0.0
        };
        let desk = p.desk_amplitude * n_desk * self.envelope(DisturbanceKind::Desk, t);
        let drift = p.cable_drift_amplitude * (2.0 * PI * p.cable_drift_hz * t).sin();
        let cable = (drift + p.cable_crackle_amplitude * n_crackle) * self.envelope(DisturbanceKind::Cable, t);
        // uniform on [-a, a] has RMS a / sqrt(3)
        let noise = 3f64.sqrt() * p.pvdf.noise_floor * floor;
        slip + desk + cable + noise
    }
}

/// Noise-free bend reading: the little finger's flexion, negated.
pub fn bend_angle(state: &HandPlantState) -> f64 {
    -state.angle(Finger::Little)
}

#[derive(Debug, Clone)]
pub struct BendSensor {
    sigma: f64,
    rng: ChaCha8Rng,
}

impl BendSensor {
    pub fn new(sigma: f64, seed: u64) -> Self {
        Self {
            sigma: sigma.abs(),
            rng: rng_for(seed, 2),
        }
    }

    pub fn read(&mut self, state: &HandPlantState) -> f64 {
        let n: f64 = self.rng.sample(StandardNormal);
        bend_angle(state) + self.sigma * n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_noise_has_unit_variance() {
        let mut b = BandNoise::new(150.0, 400.0, 1000.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let v = b.step(rng.sample(StandardNormal));
            acc += v * v;
        }
        let var = acc / n as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
        assert!(BandNoise::new(300.0, 600.0, 1000.0).is_err());
    }

    #[test]
    fn quiet_contact_gives_noise_floor_only() {
        let params = SensorSimParams::default();
        let mut sim = PvdfSim::new(&params, &[], 1000.0, 9).unwrap();
        let obj = ObjectState::none();
        let bound = 3f64.sqrt() * params.pvdf.noise_floor;
        for k in 0..10_000 {
            let v = sim.sample(&obj, k as f64 * 1e-3);
            assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let params = SensorSimParams::default();
        let w = [DisturbanceWindow {
            kind: DisturbanceKind::Desk,
            start: 0.1,
            end: 0.5,
        }];
        let mut a = PvdfSim::new(&params, &w, 1000.0, 42).unwrap();
        let mut b = PvdfSim::new(&params, &w, 1000.0, 42).unwrap();
        let obj = ObjectState::none();
        for k in 0..1000 {
            let t = k as f64 * 1e-3;
            assert_eq!(a.sample(&obj, t).to_bits(), b.sample(&obj, t).to_bits());
        }
    }

    #[test]
    fn envelope_tapers() {
        let w = DisturbanceWindow {
            kind: DisturbanceKind::Cable,
            start: 1.0,
            end: 2.0,
        };
        assert_eq!(w.envelope(0.99, 0.1), 0.0);
        assert_eq!(w.envelope(1.0, 0.1), 0.0);
        assert!((w.envelope(1.05, 0.1) - 0.5).abs() < 1e-12);
        assert_eq!(w.envelope(1.5, 0.1), 1.0);
        assert_eq!(w.envelope(2.5, 0.1), 0.0);
    }
}
