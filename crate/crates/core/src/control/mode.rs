use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Idle,
    Closing,
    Holding,
    Releasing,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Idle => "idle",
            Mode::Closing => "closing",
            Mode::Holding => "holding",
            Mode::Releasing => "releasing",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "idle" => Some(Mode::Idle),
            "closing" => Some(Mode::Closing),
            "holding" => Some(Mode::Holding),
            "releasing" => Some(Mode::Releasing),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Position of the user's toggle switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Toggle {
    Grasp,
    Release,
}

/// What the actuator should do this step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Directive {
    Off,
    /// Constant closing duty.
    Constant(f64),
    /// Output of the grasp integrator.
    Grasp,
    /// Output of the extension PI.
    Extend,
}

/// Transition caused by a [`mode_step`] call, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub from: Mode,
    pub to: Mode,
}

/// The only four edges of the chart.
pub const TRANSITIONS: [(Mode, Mode); 4] = [
    (Mode::Idle, Mode::Closing),
    (Mode::Closing, Mode::Holding),
    (Mode::Holding, Mode::Releasing),
    (Mode::Releasing, Mode::Idle),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ModeMachine {
    mode: Mode,
    contact_flag: bool,
}

impl Default for ModeMachine {
    fn default() -> Self {
        Self {
            mode: Mode::Idle,
            contact_flag: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeInputs {
    pub toggle: Toggle,
    pub contact: bool,
    pub slip_active: bool,
    /// Bend reading has settled inside the extension deadband.
    pub extension_settled: bool,
}

impl ModeMachine {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Latched once the sensor touches the object during a grasp.
    pub fn contact_flag(&self) -> bool {
        self.contact_flag
    }

    pub fn step(&mut self, inp: &ModeInputs, pre_contact_duty: f64) -> (Directive, Option<Transition>) {
        let from = self.mode;
        self.mode = match (self.mode, inp.toggle) {
            (Mode::Idle, Toggle::Grasp) => Mode::Closing,
            (Mode::Closing, _) if inp.contact => Mode::Holding,
            (Mode::Holding, Toggle::Release) => Mode::Releasing,
            (Mode::Releasing, _) if inp.extension_settled => Mode::Idle,
            (m, _) => m,
        };
        match self.mode {
            Mode::Holding => self.contact_flag = true,
            Mode::Idle | Mode::Closing => self.contact_flag = false,
            Mode::Releasing => {}
        }
        let directive = match self.mode {
            Mode::Idle => Directive::Off,
            Mode::Closing => Directive::Constant(pre_contact_duty),
            Mode::Holding => Directive::Grasp,
            Mode::Releasing => Directive::Extend,
        };
        let tr = (from != self.mode).then_some(Transition { from, to: self.mode });
        (directive, tr)
    }
}

/// Functional form of [`ModeMachine::step`].
pub fn mode_step(machine: &ModeMachine, inp: &ModeInputs, pre_contact_duty: f64) -> (ModeMachine, Directive) {
    let mut m = machine.clone();
    let (d, _) = m.step(inp, pre_contact_duty);
    (m, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inp(toggle: Toggle, contact: bool, settled: bool) -> ModeInputs {
        ModeInputs {
            toggle,
            contact,
            slip_active: false,
            extension_settled: settled,
        }
    }

    #[test]
    fn idle_grasp_closes_with_constant_duty() {
        let (m, d) = mode_step(&ModeMachine::default(), &inp(Toggle::Grasp, false, false), 0.3);
        assert_eq!(m.mode(), Mode::Closing);
        assert_eq!(d, Directive::Constant(0.3));
    }

    #[test]
    fn full_cycle() {
        let mut m = ModeMachine::default();
        m.step(&inp(Toggle::Grasp, false, false), 0.3);
        let (d, tr) = m.step(&inp(Toggle::Grasp, true, false), 0.3);
        assert_eq!(d, Directive::Grasp);
        assert_eq!(tr, Some(Transition { from: Mode::Closing, to: Mode::Holding }));
        assert!(m.contact_flag());
        let (d, _) = m.step(&inp(Toggle::Release, true, false), 0.3);
        assert_eq!(m.mode(), Mode::Releasing);
        assert_eq!(d, Directive::Extend);
        let (d, _) = m.step(&inp(Toggle::Release, false, true), 0.3);
        assert_eq!(m.mode(), Mode::Idle);
        assert_eq!(d, Directive::Off);
    }

    #[test]
    fn contact_while_idle_does_nothing() {
        let mut m = ModeMachine::default();
        m.step(&inp(Toggle::Release, true, true), 0.3);
        assert_eq!(m.mode(), Mode::Idle);
    }

    #[test]
    fn release_while_closing_is_ignored() {
        let mut m = ModeMachine::default();
        m.step(&inp(Toggle::Grasp, false, false), 0.3);
        m.step(&inp(Toggle::Release, false, true), 0.3);
        assert_eq!(m.mode(), Mode::Closing);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [Mode::Idle, Mode::Closing, Mode::Holding, Mode::Releasing] {
            assert_eq!(Mode::parse(m.as_str()), Some(m));
        }
    }
}
