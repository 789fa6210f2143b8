use proptest::prelude::*;

use slipgrip::control::{
    mode_step, ControlInputs, ControllerBank, ExtensionConfig, ExtensionPi, GraspConfig, GraspIntegrator, Mode,
    ModeInputs, ModeMachine, Toggle, TRANSITIONS,
};

fn step_input() -> impl Strategy<Value = (bool, f64, bool, bool, f64)> {
    (any::<bool>(), 0.0f64..1e3, any::<bool>(), any::<bool>(), -90.0f64..10.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn grasp_duty_bounded_and_non_decreasing(seq in prop::collection::vec((any::<bool>(), 0.0f64..1e4), 1..500)) {
        let mut g = GraspIntegrator::new(&GraspConfig::default());
        g.preload();
        let mut last = g.duty();
        for (slip, p) in seq {
            let d = g.step(slip, p, 1e-3);
            prop_assert!((0.0..=0.85).contains(&d));
            prop_assert!(d >= last);
            if !slip {
                prop_assert_eq!(d, last);
            }
            last = d;
        }
    }

    #[test]
    fn extension_output_bounded(angles in prop::collection::vec(-120.0f64..40.0, 1..500)) {
        let cfg = ExtensionConfig::default();
        let mut pi = ExtensionPi::new(&cfg);
        for a in angles {
            let u = pi.step(a, 1e-3);
            prop_assert!(u.abs() <= cfg.limit);
            if pi.in_deadband(a) {
                prop_assert_eq!(u, 0.0);
            }
        }
    }

    #[test]
    fn only_chart_edges_are_taken(seq in prop::collection::vec(step_input(), 1..400)) {
        let mut m = ModeMachine::default();
        for (grasp, _, contact, settled, _) in seq {
            let before = m.mode();
            let inp = ModeInputs {
                toggle: if grasp { Toggle::Grasp } else { Toggle::Release },
                contact,
                slip_active: false,
                extension_settled: settled,
            };
            let (next, _) = mode_step(&m, &inp, 0.3);
            let after = next.mode();
            prop_assert!(before == after || TRANSITIONS.contains(&(before, after)));
            m = next;
        }
    }

    #[test]
    fn bank_resets_on_release_and_holds_monotone(seq in prop::collection::vec(step_input(), 1..2000)) {
        let mut bank = ControllerBank::new(&GraspConfig::default(), &ExtensionConfig::default());
        let mut last: Option<(Mode, f64)> = None;
        for (grasp, power, contact, slip, bend) in seq {
            let out = bank.step(
                &ControlInputs {
                    toggle: if grasp { Toggle::Grasp } else { Toggle::Release },
                    contact,
                    slip_active: slip,
                    power,
                    bend_deg: bend,
                },
                1e-3,
            );
            prop_assert!(out.duty.abs() <= 0.85);
            match out.mode {
                Mode::Idle => prop_assert_eq!(out.duty, 0.0),
                Mode::Closing => prop_assert_eq!(out.duty, 0.30),
                Mode::Holding => {
                    prop_assert!(out.duty >= 0.0);
                    if let Some((Mode::Holding, d)) = last {
                        prop_assert!(out.duty >= d);
                    }
                }
                Mode::Releasing => prop_assert_eq!(bank.grasp().duty(), 0.0),
            }
            last = Some((out.mode, out.duty));
        }
    }
}
