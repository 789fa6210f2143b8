use num_complex::Complex64;

use super::{SignalError, TimeSeries, Unit};

/// Default acquisition rate in Hz.
pub const DEFAULT_SAMPLE_RATE: f64 = 1000.0;
/// Lowest rate at which the integrator/lead filter is discretised.
pub const MIN_SAMPLE_RATE: f64 = 200.0;

/// Continuous transfer function, coefficients in descending powers of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTf {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl ContinuousTf {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self, SignalError> {
        let num = strip_leading_zeros(num);
        let den = strip_leading_zeros(den);
        if den.is_empty() {
            return Err(SignalError::InvalidTransferFunction("zero denominator"));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(SignalError::InvalidTransferFunction("non-finite coefficient"));
        }
        if num.len() > den.len() {
            return Err(SignalError::InvalidTransferFunction("improper: numerator degree exceeds denominator"));
        }
        Ok(Self { num, den })
    }

    /// Integrator / lead compensator `(100 s + 0.1) / (s^2 + 20 s)`.
    pub fn integrator_lead() -> Self {
        Self {
            num: vec![100.0, 0.1],
            den: vec![1.0, 20.0, 0.0],
        }
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn response(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(0.0, omega);
        polyval(&self.num, s) / polyval(&self.den, s)
    }

    pub fn magnitude(&self, omega: f64) -> f64 {
        self.response(omega).norm()
    }
}

fn strip_leading_zeros(mut c: Vec<f64>) -> Vec<f64> {
    let first = c.iter().position(|&x| x != 0.0).unwrap_or(c.len());
    c.drain(..first);
    c
}

fn polyval(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Second-order section in transposed direct form II.
///
/// `y[k] = b0 x[k] + b1 x[k-1] + b2 x[k-2] - a1 y[k-1] - a2 y[k-2]`
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFilter {
    b: [f64; 3],
    a: [f64; 2],
    state: [f64; 2],
    fs: f64,
}

impl DiscreteFilter {
    pub fn from_coefficients(b: [f64; 3], a: [f64; 2], fs: f64) -> Result<Self, SignalError> {
        if b.iter().chain(&a).any(|c| !c.is_finite()) {
            return Err(SignalError::InvalidTransferFunction("non-finite coefficient"));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(SignalError::InvalidParameter {
                name: "fs",
                value: fs,
                reason: "must be positive",
            });
        }
        Ok(Self {
            b,
            a,
            state: [0.0; 2],
            fs,
        })
    }

    pub fn feedforward(&self) -> [f64; 3] {
        self.b
    }

    /// `[a1, a2]`; `a0` is normalised to one.
    pub fn feedback(&self) -> [f64; 2] {
        self.a
    }

    pub fn sample_rate(&self) -> f64 {
        self.fs
    }

    pub fn state(&self) -> [f64; 2] {
        self.state
    }

    pub fn reset(&mut self) {
        self.state = [0.0; 2];
    }

    #[inline]
    pub fn step(&mut self, x: f64) -> f64 {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let y = b0 * x + self.state[0];
        self.state[0] = b1 * x - a1 * y + self.state[1];
        self.state[1] = b2 * x - a2 * y;
        y
    }

    /// Filters a whole series, continuing from the current state.
    pub fn apply(&mut self, raw: &TimeSeries) -> Result<TimeSeries, SignalError> {
        self.check_rate(raw)?;
        let out = raw.values().iter().map(|&x| self.step(x)).collect();
        Ok(raw.with_values(out, Unit::Volts))
    }

    pub(crate) fn check_rate(&self, raw: &TimeSeries) -> Result<(), SignalError> {
        let found = raw.sample_rate();
        if ((found - self.fs) / self.fs).abs() > 1e-6 {
            return Err(SignalError::SampleRateMismatch {
                expected: self.fs,
                found,
            });
        }
        Ok(())
    }

    /// Frequency response at `omega` rad/s.
    pub fn response(&self, omega: f64) -> Complex64 {
        let zi = Complex64::from_polar(1.0, -omega / self.fs);
        let num = self.b[0] + zi * (self.b[1] + zi * self.b[2]);
        let den = 1.0 + zi * (self.a[0] + zi * self.a[1]);
        num / den
    }

    pub fn magnitude(&self, omega: f64) -> f64 {
        self.response(omega).norm()
    }
}

/// Tustin transform of a transfer function of order at most two, no
/// pre-warping.
pub fn bilinear(tf: &ContinuousTf, fs: f64) -> Result<DiscreteFilter, SignalError> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(SignalError::InvalidParameter {
            name: "fs",
            value: fs,
            reason: "must be positive",
        });
    }
    if tf.order() > 2 {
        return Err(SignalError::InvalidTransferFunction("order above two"));
    }
    let pad = |c: &[f64]| {
        let mut p = [0.0; 3];
        p[3 - c.len()..].copy_from_slice(c);
        p
    };
    let k = 2.0 * fs;
    let map = |[c2, c1, c0]: [f64; 3]| {
        [
            c2 * k * k + c1 * k + c0,
            2.0 * (c0 - c2 * k * k),
            c2 * k * k - c1 * k + c0,
        ]
    };
    let n = map(pad(tf.numerator()));
    let d = map(pad(tf.denominator()));
    if d[0] == 0.0 {
        return Err(SignalError::InvalidTransferFunction("pole at s = 2 fs"));
    }
    DiscreteFilter::from_coefficients(
        [n[0] / d[0], n[1] / d[0], n[2] / d[0]],
        [d[1] / d[0], d[2] / d[0]],
        fs,
    )
}

/// Discretises the integrator/lead compensator at `fs`.
pub fn design_filter(fs: f64) -> Result<DiscreteFilter, SignalError> {
    if !fs.is_finite() || fs < MIN_SAMPLE_RATE {
        return Err(SignalError::SampleRateTooLow {
            fs,
            min: MIN_SAMPLE_RATE,
        });
    }
    bilinear(&ContinuousTf::integrator_lead(), fs)
}
