use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::{write_manifest, EVENTS_FILE, FILTERED_FILE, POWER_FILE, REPORT_FILE};
use super::{ConfigError, HarnessError};
use crate::detector::{detect_events, write_events_csv, DetectorConfig, SlipDetector, SlipEvent};
use crate::signal::{ChainConfig, SignalChain, SignalError, TimeSeries};

/// Filter and detector settings for offline processing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessConfig {
    pub signal: ChainConfig,
    pub detector: DetectorConfig,
    /// Expected sample rate; the recording must match when set.
    pub sample_rate: Option<f64>,
}

impl ProcessConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Processed {
    pub filtered: TimeSeries,
    pub power: TimeSeries,
    pub events: Vec<SlipEvent>,
}

#[derive(Debug, Serialize)]
struct ProcessReport<'a> {
    samples: usize,
    sample_rate: f64,
    event_count: usize,
    events: &'a [SlipEvent],
}

/// Runs the signal chain and detector over a recorded raw trace.
pub fn process_recording(raw: &TimeSeries, cfg: &ProcessConfig) -> Result<Processed, HarnessError> {
    let fs = raw.sample_rate();
    if let Some(expected) = cfg.sample_rate {
        if (expected - fs).abs() > 1e-6 * expected {
            return Err(SignalError::SampleRateMismatch { expected, found: fs }.into());
        }
    }
    let mut chain = SignalChain::new(fs, &cfg.signal)?;
    let (filtered, power) = chain.process(raw)?;
    let mut detector = SlipDetector::new(&cfg.detector)?;
    let events = detect_events(&power, &mut detector);
    Ok(Processed {
        filtered,
        power,
        events,
    })
}

/// Reads `csv_path`, processes it and writes filtered, power, event and
/// report files under `out_dir`.
pub fn write_processed(csv_path: &Path, cfg: &ProcessConfig, out_dir: &Path) -> Result<Processed, HarnessError> {
    let file = fs::File::open(csv_path).map_err(|e| HarnessError::io(csv_path, e))?;
    let raw = TimeSeries::read_csv(std::io::BufReader::new(file))?;
    let out = process_recording(&raw, cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let write = |name: &str, ts: &TimeSeries| -> Result<(), HarnessError> {
        let path = out_dir.join(name);
        let f = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        ts.write_csv(std::io::BufWriter::new(f)).map_err(|e| HarnessError::io(&path, e))
    };
    write(FILTERED_FILE, &out.filtered)?;
    write(POWER_FILE, &out.power)?;
    let events_path = out_dir.join(EVENTS_FILE);
    let f = fs::File::create(&events_path).map_err(|e| HarnessError::io(&events_path, e))?;
    write_events_csv(&out.events, std::io::BufWriter::new(f)).map_err(|e| HarnessError::io(&events_path, e))?;
    let report = ProcessReport {
        samples: raw.len(),
        sample_rate: raw.sample_rate(),
        event_count: out.events.len(),
        events: &out.events,
    };
    let report_path = out_dir.join(REPORT_FILE);
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    fs::write(&report_path, json + "\n").map_err(|e| HarnessError::io(&report_path, e))?;
    let config_text = toml::to_string(cfg).expect("config serialises");
    write_manifest(
        out_dir,
        &[FILTERED_FILE, POWER_FILE, EVENTS_FILE, REPORT_FILE],
        &config_text,
        None,
        Some(raw.sample_rate()),
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Unit;

    #[test]
    fn zeros_give_no_events() {
        let raw = TimeSeries::zeros(0.0, 1e-3, 5000, Unit::Volts).unwrap();
        let out = process_recording(&raw, &ProcessConfig::default()).unwrap();
        assert!(out.events.is_empty());
        assert!(out.power.values().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn rate_mismatch_is_reported() {
        let raw = TimeSeries::zeros(0.0, 1e-3, 10, Unit::Volts).unwrap();
        let cfg = ProcessConfig {
            sample_rate: Some(2000.0),
            ..Default::default()
        };
        assert!(matches!(
            process_recording(&raw, &cfg),
            Err(HarnessError::Signal(SignalError::SampleRateMismatch { .. }))
        ));
    }
}
