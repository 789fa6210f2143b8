use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Finger, HandPlant, ObjectState, PlantError, PlantParams};

/// Allowed elastic-modulus range for a sweep, N/mm^2.
pub const MODULUS_RANGE: (f64, f64) = (50.0, 10_000.0);
const DT: f64 = 1e-3;
/// Slider speed below which the sweep counts as settled, mm/s.
const SETTLED_SPEED: f64 = 1e-5;
const SETTLED_STEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub youngs_modulus: f64,
    /// mm.
    pub slider_travel: f64,
    /// Degrees.
    pub index_bend: f64,
    pub converged: bool,
    /// Simulated time to reach the reported state, s.
    pub settle_time: f64,
}

/// `n` points log-spaced over `[lo, hi]`, both ends included.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

fn settle(params: PlantParams, blocked: Finger, time_limit: f64) -> Result<SweepRow, PlantError> {
    let mut plant = HandPlant::new(params)?;
    plant.block(blocked, 0.0);
    let object = ObjectState::none();
    let mut state = plant.posture(0.0, &object);
    let max_steps = (time_limit / DT).ceil() as usize;
    let mut quiet = 0;
    let mut steps = 0;
    while steps < max_steps && quiet < SETTLED_STEPS {
        let (next, _) = plant.step_force(&state, &object, params.sweep_force, DT)?;
        if next.slider_velocity.abs() < SETTLED_SPEED {
            quiet += 1;
        } else {
            quiet = 0;
        }
        state = next;
        steps += 1;
    }
    Ok(SweepRow {
        youngs_modulus: params.cable.youngs_modulus,
        slider_travel: state.slider_position,
        index_bend: state.angle(Finger::Index),
        converged: quiet >= SETTLED_STEPS,
        settle_time: steps as f64 * DT,
    })
}

/// Settles the hand under the sweep force for each modulus, with `blocked`
/// pinned open, and records slider travel and index-finger bend. Rows whose
/// slider has not stopped within `time_limit` seconds are flagged.
pub fn adaptive_sweep(
    params: &PlantParams,
    moduli: &[f64],
    blocked: Finger,
    time_limit: f64,
) -> Result<Vec<SweepRow>, PlantError> {
    for &e in moduli {
        if !(MODULUS_RANGE.0..=MODULUS_RANGE.1).contains(&e) {
            return Err(PlantError::InvalidParameter {
                name: "youngs_modulus",
                value: e,
                reason: "outside the 50..10000 N/mm^2 sweep range",
            });
        }
    }
    params.validate()?;
    moduli
        .par_iter()
        .map(|&e| {
            let mut p = *params;
            p.cable.youngs_modulus = e;
            settle(p, blocked, time_limit)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_ends() {
        let g = log_spaced(50.0, 10_000.0, 17);
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 50.0);
        assert_eq!(g[16], 10_000.0);
        let r = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-9);
        }
    }

    #[test]
    fn stiffer_cable_travels_less() {
        let rows = adaptive_sweep(&PlantParams::default(), &[200.0, 2000.0, 8000.0], Finger::Middle, 60.0).unwrap();
        assert!(rows.iter().all(|r| r.converged));
        assert!(rows[0].slider_travel > rows[1].slider_travel);
        assert!(rows[1].slider_travel > rows[2].slider_travel);
    }

    #[test]
    fn rejects_out_of_range_modulus() {
        assert!(adaptive_sweep(&PlantParams::default(), &[20.0], Finger::Middle, 60.0).is_err());
    }
}
