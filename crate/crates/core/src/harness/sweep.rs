use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::{write_manifest, CONFIG_FILE};
use super::report::Check;
use super::{ConfigError, HarnessError};
use crate::plant::{adaptive_sweep, log_spaced, Finger, PlantParams, SweepRow};

pub const SWEEP_TOML: &str = include_str!("../../configs/sweep.toml");
pub const SWEEP_TABLE: &str = "sweep.csv";
pub const SWEEP_SUMMARY: &str = "sweep_summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// N/mm^2.
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub count: usize,
    pub blocked: Finger,
    /// Simulated seconds allowed per row before it is flagged.
    pub time_limit: f64,
    /// Slider travel band of interest, mm.
    pub travel_band: [f64; 2],
    /// Modulus band the travel band should map to, checked when set.
    pub expected_band: Option<[f64; 2]>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            min_modulus: 50.0,
            max_modulus: 10_000.0,
            count: 17,
            blocked: Finger::Middle,
            time_limit: 60.0,
            travel_band: [3.0, 10.0],
            expected_band: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub sweep: SweepSection,
    pub plant: PlantParams,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn bundled() -> Self {
        Self::from_toml(SWEEP_TOML).expect("bundled sweep config is valid")
    }

    pub fn grid(&self) -> Vec<f64> {
        log_spaced(self.sweep.min_modulus, self.sweep.max_modulus, self.sweep.count)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sweep;
        let bad = |path: &str, msg: &str| ConfigError::Invalid {
            path: path.to_string(),
            msg: msg.to_string(),
        };
        if s.count < 2 {
            return Err(bad("sweep.count", "need at least 2 points"));
        }
        if !(s.min_modulus >= 50.0 && s.min_modulus < s.max_modulus && s.max_modulus <= 10_000.0) {
            return Err(bad("sweep.min_modulus", "need 50 <= min_modulus < max_modulus <= 10000"));
        }
        if !(s.time_limit.is_finite() && s.time_limit > 0.0) {
            return Err(bad("sweep.time_limit", "must be positive"));
        }
        if !(s.travel_band[0] >= 0.0 && s.travel_band[0] < s.travel_band[1]) {
            return Err(bad("sweep.travel_band", "need 0 <= low < high"));
        }
        if let Some([lo, hi]) = s.expected_band {
            if !(lo > 0.0 && lo < hi) {
                return Err(bad("sweep.expected_band", "need 0 < low < high"));
            }
        }
        self.plant.validate().map_err(|e| bad("plant", &e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    /// Modulus interval mapping to the travel band, interpolated in log E.
    pub band: Option<[f64; 2]>,
    /// Grid points whose travel lies inside the travel band.
    pub grid_points_in_band: Vec<f64>,
    /// No grid point falls in the travel band.
    pub degenerate: bool,
    /// Ratio between neighbouring grid points.
    pub grid_ratio: f64,
    pub travel_monotone: bool,
    pub bend_unimodal: bool,
    pub all_converged: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Log-E position where the travel curve crosses `level`, assuming travel
/// falls with E.
fn crossing(rows: &[SweepRow], level: f64) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.slider_travel >= level && b.slider_travel <= level && a.slider_travel > b.slider_travel {
            let f = (a.slider_travel - level) / (a.slider_travel - b.slider_travel);
            let (la, lb) = (a.youngs_modulus.ln(), b.youngs_modulus.ln());
            Some((la + f * (lb - la)).exp())
        } else {
            None
        }
    })
}

/// Modulus interval whose travel lies in `[lo, hi]` mm.
pub fn band_edges(rows: &[SweepRow], travel_band: [f64; 2]) -> Option<[f64; 2]> {
    let low_e = crossing(rows, travel_band[1])?;
    let high_e = crossing(rows, travel_band[0])?;
    Some([low_e, high_e])
}

fn is_unimodal(v: &[f64], tol: f64) -> bool {
    let peak = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    v[..=peak].windows(2).all(|w| w[1] >= w[0] - tol) && v[peak..].windows(2).all(|w| w[1] <= w[0] + tol)
}

fn summarise(cfg: &SweepConfig, rows: &[SweepRow]) -> SweepSummary {
    let s = &cfg.sweep;
    let [lo, hi] = s.travel_band;
    let grid_points_in_band: Vec<f64> = rows
        .iter()
        .filter(|r| r.slider_travel >= lo && r.slider_travel <= hi)
        .map(|r| r.youngs_modulus)
        .collect();
    let grid_ratio = (s.max_modulus / s.min_modulus).powf(1.0 / (s.count - 1) as f64);
    let band = band_edges(rows, s.travel_band);
    let travel_monotone = rows.windows(2).all(|w| w[1].slider_travel <= w[0].slider_travel + 1e-9);
    let bends: Vec<f64> = rows.iter().map(|r| r.index_bend).collect();
    let bend_unimodal = is_unimodal(&bends, 1e-6);
    let all_converged = rows.iter().all(|r| r.converged);
    let degenerate = grid_points_in_band.is_empty();

    let flag = |b: bool| f64::from(u8::from(b));
    let mut checks = vec![
        Check {
            name: "travel_monotone".into(),
            passed: travel_monotone,
            value: flag(travel_monotone),
            limit: "1".into(),
        },
        Check {
            name: "bend_unimodal".into(),
            passed: bend_unimodal,
            value: flag(bend_unimodal),
            limit: "1".into(),
        },
        Check {
            name: "converged".into(),
            passed: all_converged,
            value: rows.iter().filter(|r| r.converged).count() as f64,
            limit: format!("{}", rows.len()),
        },
    ];
    if let Some([elo, ehi]) = s.expected_band {
        let tol = grid_ratio.ln();
        let (passed, worst) = match band {
            Some([blo, bhi]) if !degenerate => {
                let worst = (blo / elo).ln().abs().max((bhi / ehi).ln().abs());
                (worst <= tol + 1e-12, worst.exp())
            }
            _ => (false, f64::INFINITY),
        };
        checks.push(Check {
            name: "band_within_one_grid_step".into(),
            passed,
            value: worst,
            limit: format!("<= {grid_ratio}"),
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    SweepSummary {
        band,
        grid_points_in_band,
        degenerate,
        grid_ratio,
        travel_monotone,
        bend_unimodal,
        all_converged,
        checks,
        passed,
    }
}

/// Runs the sweep over the configured grid and summarises the band.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, HarnessError> {
    cfg.validate()?;
    let rows = adaptive_sweep(&cfg.plant, &cfg.grid(), cfg.sweep.blocked, cfg.sweep.time_limit)?;
    let summary = summarise(cfg, &rows);
    Ok(SweepOutcome { rows, summary })
}

/// Writes the sweep table, summary, config copy and manifest.
pub fn write_sweep(cfg: &SweepConfig, out: &SweepOutcome, out_dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let config_text = toml::to_string(cfg).expect("config serialises");
    let cfg_path = out_dir.join(CONFIG_FILE);
    fs::write(&cfg_path, &config_text).map_err(|e| HarnessError::io(&cfg_path, e))?;

    let table = out_dir.join(SWEEP_TABLE);
    let mut buf = Vec::new();
    writeln!(buf, "youngs_modulus,slider_travel_mm,index_bend_deg,converged,settle_time_s").unwrap();
    for r in &out.rows {
        writeln!(
            buf,
            "{},{},{},{},{}",
            r.youngs_modulus,
            r.slider_travel,
            r.index_bend,
            u8::from(r.converged),
            r.settle_time
        )
        .unwrap();
    }
    fs::write(&table, buf).map_err(|e| HarnessError::io(&table, e))?;

    let summary = out_dir.join(SWEEP_SUMMARY);
    let json = serde_json::to_string_pretty(&out.summary).expect("summary serialises");
    fs::write(&summary, json + "\n").map_err(|e| HarnessError::io(&summary, e))?;
    write_manifest(out_dir, &[CONFIG_FILE, SWEEP_TABLE, SWEEP_SUMMARY], &config_text, None, None)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(e: f64, travel: f64) -> SweepRow {
        SweepRow {
            youngs_modulus: e,
            slider_travel: travel,
            index_bend: 0.0,
            converged: true,
            settle_time: 0.0,
        }
    }

    #[test]
    fn band_interpolates_in_log_e() {
        let rows = [row(100.0, 20.0), row(1000.0, 10.0), row(10_000.0, 0.0)];
        let [lo, hi] = band_edges(&rows, [5.0, 10.0]).unwrap();
        assert!((lo - 1000.0).abs() < 1e-9);
        assert!((hi - 10f64.powf(3.5)).abs() < 1e-6);
    }

    #[test]
    fn unimodal_shapes() {
        assert!(is_unimodal(&[0.0, 1.0, 3.0, 2.0, 0.5], 0.0));
        assert!(!is_unimodal(&[0.0, 2.0, 1.0, 2.0, 0.0], 0.0));
        assert!(is_unimodal(&[5.0, 4.0, 0.0], 0.0));
    }

    #[test]
    fn extremes_only_are_degenerate() {
        let mut cfg = SweepConfig::bundled();
        cfg.sweep.count = 2;
        let out = run_sweep(&cfg).unwrap();
        assert!(out.summary.degenerate);
        assert!(!out.summary.passed);
    }
}
