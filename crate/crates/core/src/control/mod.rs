//! Grasp and release control: mode machine, slip-driven integral grasp
//! controller, bend-sensor PI for extension.

mod extension;
mod grasp;
mod mode;

pub use extension::{ExtensionConfig, ExtensionPi};
pub use grasp::{reset_grasp, GraspConfig, GraspIntegrator};
pub use mode::{mode_step, Directive, Mode, ModeInputs, ModeMachine, Toggle, Transition, TRANSITIONS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInputs {
    pub toggle: Toggle,
    /// Index fingertip touches the object.
    pub contact: bool,
    pub slip_active: bool,
    /// Power of the filtered PVDF signal, V^2.
    pub power: f64,
    /// Bend-sensor reading, degrees.
    pub bend_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub mode: Mode,
    /// Signed duty; positive flexes the fingers.
    pub duty: f64,
    pub transition: Option<Transition>,
}

/// Mode machine plus both controllers, advanced at a fixed step.
#[derive(Debug, Clone)]
pub struct ControllerBank {
    machine: ModeMachine,
    grasp: GraspIntegrator,
    extension: ExtensionPi,
    settle_time: f64,
    settled_for: f64,
}

impl ControllerBank {
    pub fn new(grasp: &GraspConfig, extension: &ExtensionConfig) -> Self {
        Self {
            machine: ModeMachine::default(),
            grasp: GraspIntegrator::new(grasp),
            extension: ExtensionPi::new(extension),
            settle_time: extension.settle_time.max(0.0),
            settled_for: 0.0,
        }
    }

    pub fn mode(&self) -> Mode {
        self.machine.mode()
    }

    pub fn grasp(&self) -> &GraspIntegrator {
        &self.grasp
    }

    pub fn extension(&self) -> &ExtensionPi {
        &self.extension
    }

    pub fn step(&mut self, inp: &ControlInputs, dt: f64) -> ControlOutput {
        let settled = self.machine.mode() == Mode::Releasing && self.settled_for >= self.settle_time;
        let (directive, transition) = self.machine.step(
            &ModeInputs {
                toggle: inp.toggle,
                contact: inp.contact,
                slip_active: inp.slip_active,
                extension_settled: settled,
            },
            self.grasp.pre_contact_duty(),
        );
        if let Some(tr) = transition {
            match tr.to {
                Mode::Holding => self.grasp.preload(),
                Mode::Releasing => {
                    self.grasp.reset();
                    self.extension.reset();
                    self.settled_for = 0.0;
                }
                Mode::Idle | Mode::Closing => self.grasp.reset(),
            }
        }
        let duty = match directive {
            Directive::Off => 0.0,
            Directive::Constant(d) => d,
            Directive::Grasp => self.grasp.step(inp.slip_active, inp.power, dt),
            Directive::Extend => {
                let u = self.extension.step(inp.bend_deg, dt);
                if self.extension.in_deadband(inp.bend_deg) {
                    self.settled_for += dt;
                } else {
                    self.settled_for = 0.0;
                }
                u
            }
        };
        ControlOutput {
            mode: self.machine.mode(),
            duty,
            transition,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(toggle: Toggle, contact: bool, slip: bool, power: f64, bend: f64) -> ControlInputs {
        ControlInputs {
            toggle,
            contact,
            slip_active: slip,
            power,
            bend_deg: bend,
        }
    }

    #[test]
    fn release_resets_integrator_and_settles_to_idle() {
        let mut bank = ControllerBank::new(&GraspConfig::default(), &ExtensionConfig::default());
        let dt = 1e-3;
        bank.step(&inputs(Toggle::Grasp, false, false, 0.0, -20.0), dt);
        let out = bank.step(&inputs(Toggle::Grasp, true, false, 0.0, -55.0), dt);
        assert_eq!(out.mode, Mode::Holding);
        assert_eq!(out.duty, 0.30);
        let out = bank.step(&inputs(Toggle::Grasp, true, true, 50.0, -55.0), dt);
        assert!(out.duty > 0.30);
        let out = bank.step(&inputs(Toggle::Release, true, false, 0.0, -55.0), dt);
        assert_eq!(out.mode, Mode::Releasing);
        assert_eq!(bank.grasp().duty(), 0.0);
        assert!(out.duty < 0.0);
        let mut mode = out.mode;
        for _ in 0..199 {
            let out = bank.step(&inputs(Toggle::Release, false, false, 0.0, -21.0), dt);
            assert_eq!(out.duty, 0.0);
            mode = out.mode;
        }
        assert_eq!(mode, Mode::Releasing);
        let out = bank.step(&inputs(Toggle::Release, false, false, 0.0, -21.0), dt);
        let out = if out.mode == Mode::Releasing {
            bank.step(&inputs(Toggle::Release, false, false, 0.0, -21.0), dt)
        } else {
            out
        };
        assert_eq!(out.mode, Mode::Idle);
        assert_eq!(out.duty, 0.0);
    }
}
