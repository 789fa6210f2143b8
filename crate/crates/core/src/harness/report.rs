use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::{CONFIG_FILE, CONTROLLER_TRACE, FAULT_FILE, PLANT_TRACE};
use super::{ChecksSection, HarnessError, ScenarioConfig};
use crate::control::Mode;
use crate::detector::{EventTracker, SlipEvent};

/// Duty rises closer than this are merged into one step, s.
const STEP_MERGE_GAP: f64 = 0.25;
/// Smallest merged rise that counts as a step.
const STEP_MIN_RISE: f64 = 0.005;
/// Window at the end of the run averaged for the final bend, s.
const FINAL_WINDOW: f64 = 0.5;
/// An event is genuine if the object moved within this long before onset, s.
const SLIP_LOOKBACK: f64 = 0.5;

/// The per-sample columns every metric is computed from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceColumns {
    pub t: Vec<f64>,
    pub mode: Vec<Mode>,
    pub duty: Vec<f64>,
    pub slip_active: Vec<bool>,
    pub power: Vec<f64>,
    pub bend_deg: Vec<f64>,
    pub slip_mm: Vec<f64>,
}

impl TraceColumns {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            mode: Vec::with_capacity(n),
            duty: Vec::with_capacity(n),
            slip_active: Vec::with_capacity(n),
            power: Vec::with_capacity(n),
            bend_deg: Vec::with_capacity(n),
            slip_mm: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DutyStep {
    pub start: f64,
    pub end: f64,
    pub from: f64,
    pub to: f64,
}

impl DutyStep {
    pub fn magnitude(&self) -> f64 {
        self.to - self.from
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeChange {
    pub t: f64,
    pub from: Mode,
    pub to: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub samples: usize,
    pub slip_events: Vec<SlipEvent>,
    /// Events with no object movement during or just before them.
    pub false_events: usize,
    pub duty_steps: Vec<DutyStep>,
    pub duty_step_count: usize,
    pub max_duty: f64,
    pub max_slip_mm: f64,
    pub final_bend_deg: Option<f64>,
    pub transitions: Vec<ModeChange>,
    pub fault: Option<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn duty_steps(c: &TraceColumns) -> Vec<DutyStep> {
    let mut steps: Vec<DutyStep> = Vec::new();
    for k in 1..c.len() {
        if c.mode[k] != Mode::Holding || c.mode[k - 1] != Mode::Holding || c.duty[k] <= c.duty[k - 1] {
            continue;
        }
        match steps.last_mut() {
            Some(s) if c.t[k] - s.end <= STEP_MERGE_GAP => {
                s.end = c.t[k];
                s.to = c.duty[k];
            }
            _ => steps.push(DutyStep {
                start: c.t[k],
                end: c.t[k],
                from: c.duty[k - 1],
                to: c.duty[k],
            }),
        }
    }
    steps.retain(|s| s.magnitude() >= STEP_MIN_RISE);
    steps
}

fn false_events(c: &TraceColumns, events: &[SlipEvent]) -> usize {
    let moving: Vec<f64> = (1..c.len()).filter(|&k| c.slip_mm[k] > c.slip_mm[k - 1]).map(|k| c.t[k]).collect();
    events
        .iter()
        .filter(|e| !moving.iter().any(|&t| t >= e.onset - SLIP_LOOKBACK && t <= e.end))
        .count()
}

fn check(name: &str, passed: bool, value: f64, limit: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        value,
        limit,
    }
}

/// Derives every metric from the trace columns alone.
pub fn compute_report(name: &str, c: &TraceColumns, checks: &ChecksSection, fault: Option<String>) -> RunReport {
    let mut tracker = EventTracker::new();
    for k in 0..c.len() {
        tracker.push(c.t[k], c.power[k], c.slip_active[k]);
    }
    let slip_events = tracker.finish();
    let steps = duty_steps(c);
    let max_duty = c.duty.iter().copied().fold(0.0, f64::max);
    let max_slip_mm = c.slip_mm.iter().copied().fold(0.0, f64::max);
    let final_bend_deg = c.t.last().map(|&end| {
        let tail: Vec<f64> = c.t.iter().zip(&c.bend_deg).filter(|(&t, _)| t > end - FINAL_WINDOW).map(|(_, &b)| b).collect();
        tail.iter().sum::<f64>() / tail.len() as f64
    });
    let transitions = (1..c.len())
        .filter(|&k| c.mode[k] != c.mode[k - 1])
        .map(|k| ModeChange {
            t: c.t[k],
            from: c.mode[k - 1],
            to: c.mode[k],
        })
        .collect();
    let false_count = false_events(c, &slip_events);

    let mut list = vec![check("no_fault", fault.is_none(), f64::from(u8::from(fault.is_some())), "0".into())];
    if let Some(n) = checks.min_duty_steps {
        list.push(check("duty_steps", steps.len() >= n, steps.len() as f64, format!(">= {n}")));
    }
    if let Some(limit) = checks.max_slip_mm {
        list.push(check("max_slip_mm", max_slip_mm < limit, max_slip_mm, format!("< {limit}")));
    }
    if let (Some(target), Some(tol)) = (checks.final_bend_deg, checks.final_bend_tolerance) {
        let v = final_bend_deg.unwrap_or(f64::NAN);
        list.push(check("final_bend_deg", (v - target).abs() <= tol, v, format!("{target} +/- {tol}")));
    }
    if let Some(n) = checks.max_slip_events {
        list.push(check("slip_events", slip_events.len() <= n, slip_events.len() as f64, format!("<= {n}")));
    }
    if let Some(n) = checks.max_false_events {
        list.push(check("false_events", false_count <= n, false_count as f64, format!("<= {n}")));
    }
    if let Some(limit) = checks.max_duty {
        list.push(check("max_duty", max_duty <= limit, max_duty, format!("<= {limit}")));
    }
    let passed = list.iter().all(|c| c.passed);
    RunReport {
        scenario: name.to_string(),
        samples: c.len(),
        slip_events,
        false_events: false_count,
        duty_step_count: steps.len(),
        duty_steps: steps,
        max_duty,
        max_slip_mm,
        final_bend_deg,
        transitions,
        fault,
        checks: list,
        passed,
    }
}

fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, HarnessError> {
    let file = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| HarnessError::Trace {
        file: file.clone(),
        row: 0,
        msg: e.to_string(),
    })?;
    let got = rdr.headers().map_err(|e| HarnessError::Trace {
        file: file.clone(),
        row: 1,
        msg: e.to_string(),
    })?;
    if got.iter().collect::<Vec<_>>() != header {
        return Err(HarnessError::Trace {
            file,
            row: 1,
            msg: format!("expected header `{}`", header.join(",")),
        });
    }
    rdr.records()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| HarnessError::Trace {
                file: file.clone(),
                row: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, file: &Path, row: usize) -> Result<T, HarnessError> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| HarnessError::Trace {
        file: file.display().to_string(),
        row,
        msg: format!("bad value in column {}", i + 1),
    })
}

/// Loads the config copy and trace columns a run directory holds.
pub fn read_trace_dir(dir: &Path) -> Result<(ScenarioConfig, TraceColumns, Option<String>), HarnessError> {
    let cfg = ScenarioConfig::load(&dir.join(CONFIG_FILE))?;
    let ctrl_path = dir.join(CONTROLLER_TRACE);
    let ctrl = read_csv(&ctrl_path, &["t", "mode", "duty", "slip_active", "power", "bend_deg"])?;
    let plant_path = dir.join(PLANT_TRACE);
    let plant = read_csv(
        &plant_path,
        &["t", "slider_mm", "index_deg", "middle_deg", "ring_deg", "little_deg", "thumb_deg", "normal_N", "slip_mm", "pvdf_raw_V"],
    )?;
    if plant.len() != ctrl.len() {
        return Err(HarnessError::Trace {
            file: plant_path.display().to_string(),
            row: plant.len() + 1,
            msg: format!("{} rows, controller trace has {}", plant.len(), ctrl.len()),
        });
    }
    let mut c = TraceColumns::with_capacity(ctrl.len());
    for (i, (r, p)) in ctrl.iter().zip(&plant).enumerate() {
        let row = i + 2;
        c.t.push(field(r, 0, &ctrl_path, row)?);
        let mode: String = field(r, 1, &ctrl_path, row)?;
        c.mode.push(Mode::parse(&mode).ok_or_else(|| HarnessError::Trace {
            file: ctrl_path.display().to_string(),
            row,
            msg: format!("unknown mode `{mode}`"),
        })?);
        c.duty.push(field(r, 2, &ctrl_path, row)?);
        c.slip_active.push(field::<u8>(r, 3, &ctrl_path, row)? != 0);
        c.power.push(field(r, 4, &ctrl_path, row)?);
        c.bend_deg.push(field(r, 5, &ctrl_path, row)?);
        c.slip_mm.push(field(p, 8, &plant_path, row)?);
    }
    let fault_path = dir.join(FAULT_FILE);
    let fault = match fs::read_to_string(&fault_path) {
        Ok(s) => Some(s.trim_end().to_string()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(HarnessError::io(&fault_path, e)),
    };
    Ok((cfg, c, fault))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn holding(duty: &[f64]) -> TraceColumns {
        let n = duty.len();
        TraceColumns {
            t: (0..n).map(|k| k as f64 * 0.1).collect(),
            mode: vec![Mode::Holding; n],
            duty: duty.to_vec(),
            slip_active: vec![false; n],
            power: vec![0.0; n],
            bend_deg: vec![-20.0; n],
            slip_mm: vec![0.0; n],
        }
    }

    #[test]
    fn steps_merge_and_filter() {
        // rise over two adjacent samples, a flat gap, a tiny rise, then another step
        let c = holding(&[0.3, 0.32, 0.35, 0.35, 0.35, 0.35, 0.352, 0.352, 0.352, 0.352, 0.4]);
        let s = duty_steps(&c);
        assert_eq!(s.len(), 2);
        assert!((s[0].magnitude() - 0.05).abs() < 1e-12);
        assert!((s[1].from - 0.352).abs() < 1e-12);
    }

    #[test]
    fn checks_drive_pass_flag() {
        let c = holding(&[0.3, 0.4]);
        let checks = ChecksSection {
            min_duty_steps: Some(1),
            final_bend_deg: Some(-20.0),
            final_bend_tolerance: Some(4.0),
            ..Default::default()
        };
        let r = compute_report("t", &c, &checks, None);
        assert!(r.passed);
        let r = compute_report("t", &c, &checks, Some("boom".into()));
        assert!(!r.passed);
        let strict = ChecksSection {
            min_duty_steps: Some(2),
            ..Default::default()
        };
        assert!(!compute_report("t", &c, &strict, None).passed);
    }

    #[test]
    fn unexplained_events_are_false() {
        let mut c = holding(&[0.3; 20]);
        c.slip_active[3] = true;
        c.slip_active[15] = true;
        c.slip_mm[14..].iter_mut().for_each(|v| *v = 1.0);
        let r = compute_report("t", &c, &ChecksSection::default(), None);
        assert_eq!(r.slip_events.len(), 2);
        assert_eq!(r.false_events, 1);
    }
}
