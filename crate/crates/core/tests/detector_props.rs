use proptest::prelude::*;

use slipgrip::detector::{detect_events, detector_step, DetectorConfig, DetectorState, SlipDetector};
use slipgrip::signal::{TimeSeries, Unit};

fn trace() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(1.0), Just(3.0), -2.0f64..8.0], 1..200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn output_only_changes_on_threshold_crossings(u in trace()) {
        let mut st = DetectorState::new(3.0, 1.0).unwrap();
        let (mut prev_u, mut prev_o) = (0.0, false);
        for &x in &u {
            let o = st.step(x);
            if o != prev_o {
                if o {
                    prop_assert!(x >= prev_u && x >= 3.0);
                } else {
                    prop_assert!(x < prev_u && x <= 1.0);
                }
            }
            prev_u = x;
            prev_o = o;
        }
    }

    #[test]
    fn raising_the_high_bound_never_adds_activity(u in trace(), extra in 0.0f64..5.0) {
        let mut a = DetectorState::new(3.0, 1.0).unwrap();
        let mut b = DetectorState::new(3.0 + extra, 1.0).unwrap();
        for &x in &u {
            let (oa, ob) = (a.step(x), b.step(x));
            prop_assert!(!ob || oa);
        }
    }

    #[test]
    fn functional_and_stateful_forms_agree(u in trace()) {
        let mut st = DetectorState::new(3.0, 1.0).unwrap();
        let mut fs = DetectorState::new(3.0, 1.0).unwrap();
        for &x in &u {
            let (next, o) = detector_step(fs, x);
            fs = next;
            prop_assert_eq!(st.step(x), o);
        }
    }

    #[test]
    fn events_cover_exactly_the_active_samples(u in prop::collection::vec(0.0f64..6.0, 2..300)) {
        let power = TimeSeries::new(0.0, 1e-3, u.clone(), Unit::VoltsSquared).unwrap();
        let mut det = SlipDetector::new(&DetectorConfig::default()).unwrap();
        let events = detect_events(&power, &mut det);
        let mut st = DetectorState::new(3.0, 1.0).unwrap();
        let active: Vec<bool> = u.iter().map(|&x| st.step(x)).collect();
        let covered = |k: usize| {
            let t = k as f64 * 1e-3;
            events.iter().any(|e| t >= e.onset - 1e-12 && t <= e.end + 1e-12)
        };
        for (k, &a) in active.iter().enumerate() {
            prop_assert_eq!(a, covered(k));
        }
        for w in events.windows(2) {
            prop_assert!(w[0].end < w[1].onset);
        }
    }
}

#[test]
fn rejects_inverted_bounds() {
    assert!(DetectorState::new(1.0, 3.0).is_err());
    assert!(DetectorState::new(f64::NAN, 1.0).is_err());
}
