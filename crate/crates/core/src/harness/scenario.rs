use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::output::{write_manifest, CONFIG_FILE, CONTROLLER_TRACE, EVENTS_FILE, FAULT_FILE, FILTERED_FILE, PLANT_TRACE, POWER_FILE, REPORT_FILE};
use super::report::{compute_report, RunReport, TraceColumns};
use super::{Event, HarnessError, ScenarioConfig};
use crate::control::{ControlInputs, ControllerBank, Toggle};
use crate::detector::{write_events_csv, EventTracker, SlipDetector};
use crate::plant::{BendSensor, Finger, HandPlant, ObjectState, PvdfSim};
use crate::signal::{SignalChain, TimeSeries, Unit};

/// Columns written to the plant trace in addition to what the report needs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlantColumns {
    pub slider_mm: Vec<f64>,
    pub angles: Vec<[f64; 5]>,
    pub normal: Vec<f64>,
    pub raw: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub columns: TraceColumns,
    pub plant: PlantColumns,
    pub filtered: Vec<f64>,
    /// Diagnostic of the step that stopped the run early.
    pub fault: Option<String>,
}

/// Runs the closed loop: plant, PVDF, filter, power, detector, controllers,
/// back to the plant, all on one fixed grid.
pub fn simulate(cfg: &ScenarioConfig) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let fs = cfg.scenario.sample_rate;
    let dt = cfg.dt();
    let seed = cfg.scenario.seed;
    let plant = HandPlant::new(cfg.plant)?;
    let mut chain = SignalChain::new(fs, &cfg.signal)?;
    let mut detector = SlipDetector::new(&cfg.detector)?;
    let mut bank = ControllerBank::new(&cfg.grasp, &cfg.extension);
    let mut pvdf = PvdfSim::new(&cfg.sensor, &cfg.disturbances, fs, seed)?;
    let mut bend = BendSensor::new(cfg.sensor.bend_noise, seed);

    let mut object = match &cfg.object {
        Some(o) => ObjectState::resting(o.mass, o.friction_coefficient, o.contact_angle_deg, o.torque_arm),
        None => ObjectState::none(),
    };
    let mut state = plant.posture(plant.slider_for_angle(cfg.scenario.initial_flexion_deg), &object);
    let mut toggle = Toggle::Release;
    let mut next_event = 0;

    let n = cfg.steps();
    let mut cols = TraceColumns::with_capacity(n);
    let mut pc = PlantColumns::default();
    let mut filtered = Vec::with_capacity(n);
    let mut fault = None;

    for k in 0..n {
        let t = k as f64 / fs;
        while let Some(e) = cfg.events.get(next_event).filter(|e| e.time() <= t) {
            match *e {
                Event::Toggle { position, .. } => toggle = position,
                Event::Lift { .. } => object.supported = false,
                Event::Place { .. } => object.supported = true,
                Event::AddMass { mass, .. } => object.mass += mass,
                Event::ApplyTorque { torque, .. } => object.external_torque += torque,
            }
            next_event += 1;
        }

        let raw = pvdf.sample(&object, t);
        let (y, power) = chain.step(raw);
        let slip_active = detector.step_power(power);
        let bend_deg = bend.read(&state);
        let out = bank.step(
            &ControlInputs {
                toggle,
                contact: state.contact[Finger::Index.index()],
                slip_active,
                power,
                bend_deg,
            },
            dt,
        );

        cols.t.push(t);
        cols.mode.push(out.mode);
        cols.duty.push(out.duty);
        cols.slip_active.push(slip_active);
        cols.power.push(power);
        cols.bend_deg.push(bend_deg);
        cols.slip_mm.push(object.slip_displacement);
        pc.slider_mm.push(state.slider_position);
        pc.angles.push(state.finger_angles);
        pc.normal.push(object.normal_force);
        pc.raw.push(raw);
        filtered.push(y);

        match plant.step(&state, &object, out.duty, dt) {
            Ok((s, o)) => {
                state = s;
                object = o;
            }
            Err(e) => {
                fault = Some(format!("t = {t} s: {e}"));
                break;
            }
        }
    }
    Ok(RunOutcome {
        columns: cols,
        plant: pc,
        filtered,
        fault,
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, HarnessError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

fn write_plant_trace(path: &Path, run: &RunOutcome) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    let io = |e| HarnessError::io(path, e);
    writeln!(w, "t,slider_mm,index_deg,middle_deg,ring_deg,little_deg,thumb_deg,normal_N,slip_mm,pvdf_raw_V").map_err(io)?;
    let c = &run.columns;
    let p = &run.plant;
    for k in 0..c.t.len() {
        let a = &p.angles[k];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            c.t[k], p.slider_mm[k], a[0], a[1], a[2], a[3], a[4], p.normal[k], c.slip_mm[k], p.raw[k]
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

fn write_controller_trace(path: &Path, c: &TraceColumns) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    let io = |e| HarnessError::io(path, e);
    writeln!(w, "t,mode,duty,slip_active,power,bend_deg").map_err(io)?;
    for k in 0..c.t.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            c.t[k],
            c.mode[k],
            c.duty[k],
            u8::from(c.slip_active[k]),
            c.power[k],
            c.bend_deg[k]
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

fn write_series(path: &Path, values: Vec<f64>, dt: f64, unit: Unit) -> Result<(), HarnessError> {
    let w = create(path)?;
    // an empty run still gets a header-only file
    match TimeSeries::new(0.0, dt, values, unit) {
        Ok(ts) => ts.write_csv(w).map_err(|e| HarnessError::io(path, e)),
        Err(_) => {
            let mut w = w;
            writeln!(w, "t,value,unit").map_err(|e| HarnessError::io(path, e))
        }
    }
}

/// Writes every trace, the report, a copy of the config and the manifest.
pub fn write_run(cfg: &ScenarioConfig, run: &RunOutcome, out_dir: &Path) -> Result<RunReport, HarnessError> {
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let dt = cfg.dt();
    let config_text = cfg.to_toml();
    let cfg_path = out_dir.join(CONFIG_FILE);
    fs::write(&cfg_path, &config_text).map_err(|e| HarnessError::io(&cfg_path, e))?;

    write_plant_trace(&out_dir.join(PLANT_TRACE), run)?;
    write_controller_trace(&out_dir.join(CONTROLLER_TRACE), &run.columns)?;
    write_series(&out_dir.join(FILTERED_FILE), run.filtered.clone(), dt, Unit::Volts)?;
    write_series(&out_dir.join(POWER_FILE), run.columns.power.clone(), dt, Unit::VoltsSquared)?;

    let mut tracker = EventTracker::new();
    for k in 0..run.columns.t.len() {
        tracker.push(run.columns.t[k], run.columns.power[k], run.columns.slip_active[k]);
    }
    let events_path = out_dir.join(EVENTS_FILE);
    write_events_csv(&tracker.finish(), create(&events_path)?).map_err(|e| HarnessError::io(&events_path, e))?;

    let fault_path = out_dir.join(FAULT_FILE);
    match &run.fault {
        Some(msg) => fs::write(&fault_path, format!("{msg}\n")).map_err(|e| HarnessError::io(&fault_path, e))?,
        None if fault_path.exists() => fs::remove_file(&fault_path).map_err(|e| HarnessError::io(&fault_path, e))?,
        None => {}
    }

    let report = compute_report(&cfg.scenario.name, &run.columns, &cfg.checks, run.fault.clone());
    let report_path = out_dir.join(REPORT_FILE);
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    fs::write(&report_path, json + "\n").map_err(|e| HarnessError::io(&report_path, e))?;

    write_manifest(
        out_dir,
        &[CONFIG_FILE, PLANT_TRACE, CONTROLLER_TRACE, FILTERED_FILE, POWER_FILE, EVENTS_FILE, FAULT_FILE, REPORT_FILE],
        &config_text,
        Some(cfg.scenario.seed),
        Some(cfg.scenario.sample_rate),
    )?;
    Ok(report)
}

/// Simulates `cfg` and writes all outputs under `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, HarnessError> {
    let run = simulate(cfg)?;
    write_run(cfg, &run, out_dir)
}
