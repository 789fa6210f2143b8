//! Deadzone (hysteresis) slip detector over the power signal.
//!
//! ```text
//!   output
//!     1 ┤        ┌──────────────<── hold ───┐
//!       │        │                          │
//!     0 ┤────────┘──── hold ──>─────────────┘
//!       └────────┬──────────────────────────┬──── u
//!               LB                          HB
//! ```
//!
//! Switches on when the sample is non-decreasing and at or above `HB`,
//! off when it is decreasing and at or below `LB`, and holds otherwise.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::TimeSeries;

#[derive(Debug, Error, PartialEq)]
pub enum DetectorError {
    #[error("bounds must satisfy HB > LB > 0 (HB = {high}, LB = {low})")]
    InvalidBounds { high: f64, low: f64 },
    #[error("normalization must be positive, got {0}")]
    InvalidNormalization(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub high_bound: f64,
    pub low_bound: f64,
    /// Power is divided by this before comparison with the bounds.
    pub normalization: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            high_bound: 3.0,
            low_bound: 1.0,
            normalization: 1.0,
        }
    }
}

/// Latch state: bounds, previous sample and current output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorState {
    high_bound: f64,
    low_bound: f64,
    prev_u: f64,
    output: bool,
}

impl DetectorState {
    /// Starts with output 0 and previous sample 0.
    pub fn new(high_bound: f64, low_bound: f64) -> Result<Self, DetectorError> {
        if !(high_bound.is_finite() && low_bound.is_finite() && high_bound > low_bound && low_bound > 0.0) {
            return Err(DetectorError::InvalidBounds {
                high: high_bound,
                low: low_bound,
            });
        }
        Ok(Self {
            high_bound,
            low_bound,
            prev_u: 0.0,
            output: false,
        })
    }

    pub fn high_bound(&self) -> f64 {
        self.high_bound
    }

    pub fn low_bound(&self) -> f64 {
        self.low_bound
    }

    pub fn prev_u(&self) -> f64 {
        self.prev_u
    }

    pub fn output(&self) -> bool {
        self.output
    }

    pub fn reset(&mut self) {
        self.prev_u = 0.0;
        self.output = false;
    }

    #[inline]
    pub fn step(&mut self, u: f64) -> bool {
        if u >= self.prev_u && u >= self.high_bound {
            self.output = true;
        } else if u < self.prev_u && u <= self.low_bound {
            self.output = false;
        }
        self.prev_u = u;
        self.output
    }
}

/// Functional form of [`DetectorState::step`].
pub fn detector_step(state: DetectorState, u: f64) -> (DetectorState, bool) {
    let mut next = state;
    let out = next.step(u);
    (next, out)
}

/// Detector plus the normalisation applied to incoming power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipDetector {
    state: DetectorState,
    normalization: f64,
}

impl SlipDetector {
    pub fn new(cfg: &DetectorConfig) -> Result<Self, DetectorError> {
        if !(cfg.normalization.is_finite() && cfg.normalization > 0.0) {
            return Err(DetectorError::InvalidNormalization(cfg.normalization));
        }
        Ok(Self {
            state: DetectorState::new(cfg.high_bound, cfg.low_bound)?,
            normalization: cfg.normalization,
        })
    }

    pub fn state(&self) -> &DetectorState {
        &self.state
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    #[inline]
    pub fn step_power(&mut self, power: f64) -> bool {
        self.state.step(power / self.normalization)
    }
}

/// One maximal run of detector output 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipEvent {
    /// Time of the first active sample.
    pub onset: f64,
    /// Time of the last active sample.
    pub end: f64,
    /// Largest power seen while active, in the units of the input power.
    pub peak_power: f64,
}

/// Folds a stream of `(t, power, active)` samples into events.
#[derive(Debug, Clone, Default)]
pub struct EventTracker {
    open: Option<SlipEvent>,
    closed: Vec<SlipEvent>,
}

impl EventTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, power: f64, active: bool) {
        match (&mut self.open, active) {
            (Some(ev), true) => {
                ev.end = t;
                ev.peak_power = ev.peak_power.max(power);
            }
            (Some(_), false) => self.closed.extend(self.open.take()),
            (None, true) => {
                self.open = Some(SlipEvent {
                    onset: t,
                    end: t,
                    peak_power: power,
                })
            }
            (None, false) => {}
        }
    }

    pub fn events(&self) -> &[SlipEvent] {
        &self.closed
    }

    /// Closes an event still open at the end of the stream.
    pub fn finish(mut self) -> Vec<SlipEvent> {
        self.closed.extend(self.open.take());
        self.closed
    }
}

/// Runs the detector over a power series and returns the active intervals.
pub fn detect_events(power: &TimeSeries, detector: &mut SlipDetector) -> Vec<SlipEvent> {
    let mut tracker = EventTracker::new();
    for (t, p) in power.iter() {
        let active = detector.step_power(p);
        tracker.push(t, p, active);
    }
    tracker.finish()
}

pub fn write_events_csv<W: Write>(events: &[SlipEvent], mut w: W) -> std::io::Result<()> {
    writeln!(w, "onset_s,end_s,peak_power")?;
    for e in events {
        writeln!(w, "{:.9},{:.9},{}", e.onset, e.end, e.peak_power)?;
    }
    w.flush()
}

pub fn read_events_csv<R: Read>(r: R) -> Result<Vec<SlipEvent>, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let get = |i: usize| -> Result<f64, csv::Error> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    csv::Error::from(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("bad field {i} on line {}", rec.position().map_or(0, |p| p.line())),
                    ))
                })
        };
        out.push(SlipEvent {
            onset: get(0)?,
            end: get(1)?,
            peak_power: get(2)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Unit;

    fn det() -> DetectorState {
        DetectorState::new(3.0, 1.0).unwrap()
    }

    fn run(values: &[f64]) -> Vec<SlipEvent> {
        let ts = TimeSeries::new(0.0, 1e-3, values.to_vec(), Unit::VoltsSquared).unwrap();
        detect_events(&ts, &mut SlipDetector::new(&DetectorConfig::default()).unwrap())
    }

    #[test]
    fn rising_through_high_bound_switches_on() {
        let (s, out) = detector_step(det(), 0.0);
        assert!(!out);
        let (_, out) = detector_step(s, 5.0);
        assert!(out);
    }

    #[test]
    fn falling_through_low_bound_switches_off() {
        let mut s = det();
        s.step(5.0);
        assert!(s.output());
        assert!(!s.step(0.5));
    }

    #[test]
    fn dead_band_holds() {
        let mut s = det();
        s.step(5.0);
        assert!(s.step(2.0));
        assert!(s.step(2.5));
        let mut s = det();
        s.step(2.0);
        assert!(!s.step(2.9));
    }

    #[test]
    fn equal_samples_count_as_rising() {
        let mut s = det();
        s.step(3.0);
        assert!(s.output());
        let mut s = det();
        s.step(0.5);
        // not falling, so no switch-off even below LB
        s.output = true;
        assert!(s.step(0.5));
    }

    #[test]
    fn truth_table_only_two_cases_force_a_transition() {
        // prev sample 2 sits in the dead band; probe every region on both sides
        for prev_out in [false, true] {
            for u in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
                let mut s = det();
                s.prev_u = 2.0;
                s.output = prev_out;
                let rising = u >= 2.0;
                let expect = if rising && u >= 3.0 {
                    true
                } else if !rising && u <= 1.0 {
                    false
                } else {
                    prev_out
                };
                assert_eq!(s.step(u), expect, "prev {prev_out} u {u}");
            }
        }
    }

    #[test]
    fn invalid_bounds() {
        assert!(DetectorState::new(1.0, 3.0).is_err());
        assert!(DetectorState::new(3.0, 3.0).is_err());
        assert!(DetectorState::new(3.0, 0.0).is_err());
        assert!(SlipDetector::new(&DetectorConfig {
            normalization: 0.0,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn event_examples() {
        assert!(run(&[0.0; 50]).is_empty());

        let ev = run(&[0.0, 1.0, 4.0, 6.0, 2.0, 0.5, 0.0]);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].peak_power, 6.0);
        assert!((ev[0].onset - 0.002).abs() < 1e-12);
        assert!((ev[0].end - 0.004).abs() < 1e-12);

        let mut chatter = vec![0.0, 4.0];
        for _ in 0..20 {
            chatter.extend([1.5, 2.5]);
        }
        chatter.extend([0.5, 0.0]);
        assert_eq!(run(&chatter).len(), 1);
    }

    #[test]
    fn open_event_is_closed_at_end() {
        let ev = run(&[0.0, 5.0, 5.0]);
        assert_eq!(ev.len(), 1);
        assert!((ev[0].end - 0.002).abs() < 1e-12);
    }

    #[test]
    fn events_csv_round_trip() {
        let ev = vec![
            SlipEvent { onset: 1.0, end: 1.25, peak_power: 7.5 },
            SlipEvent { onset: 3.0, end: 3.001, peak_power: 3.0 },
        ];
        let mut buf = Vec::new();
        write_events_csv(&ev, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("onset_s,end_s,peak_power\n"));
        assert_eq!(read_events_csv(&buf[..]).unwrap(), ev);
    }
}
