use serde::{Deserialize, Serialize};

use super::{design_filter, DiscreteFilter, SignalError, TimeSeries, Unit};

/// Squared samples, used as the instantaneous power of the filtered signal.
pub fn power_signal(filtered: &TimeSeries) -> TimeSeries {
    let p = filtered.values().iter().map(|y| y * y).collect();
    filtered.with_values(p, Unit::VoltsSquared)
}

/// Post-filter settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    /// Output scale applied after the compensator.
    pub gain: f64,
    /// Corner of an optional one-pole DC blocker in front of the
    /// compensator. Bleeds off what the integrator would otherwise
    /// accumulate on long recordings.
    pub dc_block_hz: Option<f64>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            gain: 1.0,
            dc_block_hz: None,
        }
    }
}

/// `y[k] = x[k] - x[k-1] + r y[k-1]`.
#[derive(Debug, Clone)]
pub struct DcBlocker {
    r: f64,
    x1: f64,
    y1: f64,
}

impl DcBlocker {
    pub fn new(corner_hz: f64, fs: f64) -> Result<Self, SignalError> {
        if !(corner_hz.is_finite() && corner_hz > 0.0 && corner_hz < fs / 2.0) {
            return Err(SignalError::InvalidParameter {
                name: "dc_block_hz",
                value: corner_hz,
                reason: "must lie in (0, fs/2)",
            });
        }
        Ok(Self {
            r: (-2.0 * std::f64::consts::PI * corner_hz / fs).exp(),
            x1: 0.0,
            y1: 0.0,
        })
    }

    pub fn step(&mut self, x: f64) -> f64 {
        let y = x - self.x1 + self.r * self.y1;
        self.x1 = x;
        self.y1 = y;
        y
    }
}

/// Raw PVDF volts in, filtered volts and power out. One instance per stream.
#[derive(Debug, Clone)]
pub struct SignalChain {
    filter: DiscreteFilter,
    dc: Option<DcBlocker>,
    gain: f64,
}

impl SignalChain {
    pub fn new(fs: f64, cfg: &ChainConfig) -> Result<Self, SignalError> {
        if !(cfg.gain.is_finite() && cfg.gain > 0.0) {
            return Err(SignalError::InvalidParameter {
                name: "gain",
                value: cfg.gain,
                reason: "must be positive",
            });
        }
        let dc = cfg.dc_block_hz.map(|hz| DcBlocker::new(hz, fs)).transpose()?;
        Ok(Self {
            filter: design_filter(fs)?,
            dc,
            gain: cfg.gain,
        })
    }

    pub fn filter(&self) -> &DiscreteFilter {
        &self.filter
    }

    /// Returns `(filtered, power)`.
    #[inline]
    pub fn step(&mut self, raw: f64) -> (f64, f64) {
        let x = match &mut self.dc {
            Some(dc) => dc.step(raw),
            None => raw,
        };
        let y = self.gain * self.filter.step(x);
        (y, y * y)
    }

    pub fn process(&mut self, raw: &TimeSeries) -> Result<(TimeSeries, TimeSeries), SignalError> {
        self.filter.check_rate(raw)?;
        let filtered: Vec<f64> = raw.values().iter().map(|&x| self.step(x).0).collect();
        let filtered = raw.with_values(filtered, Unit::Volts);
        let power = power_signal(&filtered);
        Ok((filtered, power))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_spot_values_and_sign() {
        let y = TimeSeries::new(0.0, 1e-3, vec![0.0, -2.0, 2.0, 0.5], Unit::Volts).unwrap();
        let p = power_signal(&y);
        assert_eq!(p.values(), &[0.0, 4.0, 4.0, 0.25]);
        assert_eq!(p.unit(), Unit::VoltsSquared);
    }

    #[test]
    fn sine_power_averages_half_amplitude_squared() {
        let fs = 1000.0;
        let amp = 1.7;
        let f = 13.0; // 13 whole periods per second
        let n = 1000;
        let vals = (0..n)
            .map(|k| amp * (2.0 * std::f64::consts::PI * f * k as f64 / fs).sin())
            .collect();
        let y = TimeSeries::new(0.0, 1.0 / fs, vals, Unit::Volts).unwrap();
        let p = power_signal(&y);
        let mean = p.values().iter().sum::<f64>() / n as f64;
        assert!((mean / (amp * amp / 2.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn dc_blocker_removes_offset() {
        let mut dc = DcBlocker::new(0.5, 1000.0).unwrap();
        let mut y = 0.0;
        for _ in 0..20_000 {
            y = dc.step(1.0);
        }
        assert!(y.abs() < 1e-6);
        assert!(DcBlocker::new(600.0, 1000.0).is_err());
    }

    #[test]
    fn gain_scales_output() {
        let mut a = SignalChain::new(1000.0, &ChainConfig::default()).unwrap();
        let mut b = SignalChain::new(
            1000.0,
            &ChainConfig {
                gain: 2.0,
                ..Default::default()
            },
        )
        .unwrap();
        for k in 0..100 {
            let x = (k as f64 * 0.3).sin();
            let (ya, _) = a.step(x);
            let (yb, pb) = b.step(x);
            assert!((yb - 2.0 * ya).abs() < 1e-12);
            assert!((pb - yb * yb).abs() < 1e-12);
        }
    }
}
