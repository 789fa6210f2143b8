//! PVDF signal chain: sampled series, charge model, the integrator/lead
//! filter and the power transform.

mod chain;
mod filter;
mod pvdf;

pub use chain::{power_signal, ChainConfig, DcBlocker, SignalChain};
pub use filter::{
    bilinear, design_filter, ContinuousTf, DiscreteFilter, DEFAULT_SAMPLE_RATE, MIN_SAMPLE_RATE,
};
pub use pvdf::{charge_to_voltage, charge_voltage, PvdfParams, PvdfSensor};

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("sample interval must be finite and positive, got {0}")]
    InvalidInterval(f64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("sample rate {fs} Hz is below the minimum of {min} Hz")]
    SampleRateTooLow { fs: f64, min: f64 },
    #[error("series sampled at {found} Hz but filter expects {expected} Hz")]
    SampleRateMismatch { expected: f64, found: f64 },
    #[error("invalid transfer function: {0}")]
    InvalidTransferFunction(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Engineering unit carried alongside a [`TimeSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    Volts,
    VoltsSquared,
    Newtons,
    Degrees,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Volts => "V",
            Unit::VoltsSquared => "V^2",
            Unit::Newtons => "N",
            Unit::Degrees => "deg",
        }
    }

    pub fn parse(s: &str) -> Option<Unit> {
        match s {
            "V" => Some(Unit::Volts),
            "V^2" => Some(Unit::VoltsSquared),
            "N" => Some(Unit::Newtons),
            "deg" => Some(Unit::Degrees),
            _ => None,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Uniformly sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    unit: Unit,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, unit: Unit) -> Result<Self, SignalError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SignalError::InvalidInterval(dt));
        }
        if !t0.is_finite() {
            return Err(SignalError::InvalidParameter {
                name: "t0",
                value: t0,
                reason: "must be finite",
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SignalError::NonFinite(i));
        }
        Ok(Self {
            t0,
            dt,
            values,
            unit,
        })
    }

    pub fn zeros(t0: f64, dt: f64, len: usize, unit: Unit) -> Result<Self, SignalError> {
        Self::new(t0, dt, vec![0.0; len], unit)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.time_at(k), v))
    }

    /// Same grid, new values. Callers guarantee finiteness.
    pub(crate) fn with_values(&self, values: Vec<f64>, unit: Unit) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            t0: self.t0,
            dt: self.dt,
            values,
            unit,
        }
    }

    /// Writes `t,value,unit` rows. Time carries nine decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value,unit")?;
        for (t, v) in self.iter() {
            writeln!(w, "{t:.9},{v},{}", self.unit)?;
        }
        w.flush()
    }

    /// Parses the `t,value,unit` format. At least two rows are needed to
    /// recover the sample interval.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, SignalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(r);
        let header = rdr.headers().map_err(|e| SignalError::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        if header.iter().collect::<Vec<_>>() != ["t", "value", "unit"] {
            return Err(SignalError::Parse {
                line: 1,
                msg: format!("expected header `t,value,unit`, got `{}`", header.iter().collect::<Vec<_>>().join(",")),
            });
        }

        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut unit = None;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| SignalError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                msg: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |i: usize, name: &str| {
                rec.get(i).ok_or_else(|| SignalError::Parse {
                    line,
                    msg: format!("missing `{name}` column"),
                })
            };
            let parse = |s: &str, name: &str| -> Result<f64, SignalError> {
                let v: f64 = s.parse().map_err(|_| SignalError::Parse {
                    line,
                    msg: format!("`{name}` is not a number: `{s}`"),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(SignalError::Parse {
                        line,
                        msg: format!("`{name}` is not finite"),
                    })
                }
            };
            times.push(parse(field(0, "t")?, "t")?);
            values.push(parse(field(1, "value")?, "value")?);
            let u_str = field(2, "unit")?;
            let u = Unit::parse(u_str).ok_or_else(|| SignalError::Parse {
                line,
                msg: format!("unknown unit `{u_str}`"),
            })?;
            match unit {
                None => unit = Some(u),
                Some(prev) if prev != u => {
                    return Err(SignalError::Parse {
                        line,
                        msg: format!("unit changes from {prev} to {u}"),
                    })
                }
                _ => {}
            }
        }

        if times.len() < 2 {
            return Err(SignalError::Parse {
                line: times.len() as u64 + 1,
                msg: "need at least two samples to infer the sample interval".into(),
            });
        }
        let n = times.len();
        let t0 = times[0];
        let dt = (times[n - 1] - t0) / (n - 1) as f64;
        if dt.is_nan() || dt <= 0.0 {
            return Err(SignalError::Parse {
                line: 2,
                msg: "time column must be strictly increasing".into(),
            });
        }
        // Rows are 1-based with the header on line 1.
        let tol = 1e-6_f64.max(dt * 1e-3);
        for (k, &t) in times.iter().enumerate() {
            let expected = t0 + k as f64 * dt;
            if (t - expected).abs() > tol {
                return Err(SignalError::Parse {
                    line: k as u64 + 2,
                    msg: format!("non-uniform sampling: t = {t}, expected {expected:.9}"),
                });
            }
        }
        TimeSeries::new(t0, dt, values, unit.unwrap_or(Unit::Volts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_interval_and_nan() {
        assert!(matches!(
            TimeSeries::new(0.0, 0.0, vec![], Unit::Volts),
            Err(SignalError::InvalidInterval(_))
        ));
        assert!(matches!(
            TimeSeries::new(0.0, 1e-3, vec![0.0, f64::NAN], Unit::Volts),
            Err(SignalError::NonFinite(1))
        ));
        assert!(TimeSeries::new(0.0, 1e-3, vec![], Unit::Volts).is_ok());
    }

    #[test]
    fn csv_round_trip_is_exact_in_value() {
        let ts = TimeSeries::new(0.5, 1e-3, vec![0.1, -2.5e-7, 3.0, 1.0 / 3.0], Unit::Volts).unwrap();
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value,unit\n0.500000000,0.1,V\n"));
        let back = TimeSeries::read_csv(&buf[..]).unwrap();
        assert_eq!(back.values(), ts.values());
        assert!((back.dt() - 1e-3).abs() < 1e-12);
        assert_eq!(back.unit(), Unit::Volts);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "t,value,unit\n0.0,1,V\n0.001,oops,V\n";
        match TimeSeries::read_csv(bad.as_bytes()) {
            Err(SignalError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let gap = "t,value,unit\n0.0,1,V\n0.001,1,V\n0.005,1,V\n0.006,1,V\n";
        match TimeSeries::read_csv(gap.as_bytes()) {
            Err(SignalError::Parse { line, .. }) => assert!(line >= 3),
            other => panic!("unexpected {other:?}"),
        }
        let header = "time,v\n0,1\n";
        assert!(matches!(
            TimeSeries::read_csv(header.as_bytes()),
            Err(SignalError::Parse { line: 1, .. })
        ));
    }
}
