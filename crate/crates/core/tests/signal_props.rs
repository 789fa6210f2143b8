use proptest::prelude::*;

use slipgrip::signal::{
    charge_voltage, design_filter, power_signal, ChainConfig, PvdfParams, SignalChain, TimeSeries, Unit,
};

fn samples(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn filter_is_linear(x in samples(300), y in samples(300), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let n = x.len().min(y.len());
        let run = |input: &[f64]| {
            let mut f = design_filter(1000.0).unwrap();
            input.iter().map(|&v| f.step(v)).collect::<Vec<_>>()
        };
        let mix: Vec<f64> = (0..n).map(|k| a * x[k] + b * y[k]).collect();
        let (fx, fy, fm) = (run(&x[..n]), run(&y[..n]), run(&mix));
        for k in 0..n {
            let expect = a * fx[k] + b * fy[k];
            prop_assert!((fm[k] - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn filter_is_time_invariant(x in samples(200), delay in 1usize..50) {
        let mut f = design_filter(1000.0).unwrap();
        let direct: Vec<f64> = x.iter().map(|&v| f.step(v)).collect();
        let mut g = design_filter(1000.0).unwrap();
        let shifted: Vec<f64> = std::iter::repeat_n(0.0, delay).chain(x.iter().copied()).map(|v| g.step(v)).collect();
        for (k, d) in direct.iter().enumerate() {
            prop_assert!((shifted[k + delay] - d).abs() <= 1e-12 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn power_is_square_of_filtered(x in samples(400), gain in 0.1f64..4.0) {
        let raw = TimeSeries::new(0.0, 1e-3, x, Unit::Volts).unwrap();
        let mut chain = SignalChain::new(1000.0, &ChainConfig { gain, dc_block_hz: None }).unwrap();
        let (filtered, power) = chain.process(&raw).unwrap();
        prop_assert_eq!(power.unit(), Unit::VoltsSquared);
        for (y, p) in filtered.values().iter().zip(power.values()) {
            prop_assert!(*p >= 0.0);
            prop_assert_eq!(*p, y * y);
        }
        let again = power_signal(&filtered);
        prop_assert_eq!(again.values(), power.values());
    }

    #[test]
    fn charge_voltage_scales_with_charge(q in -1e-9f64..1e-9, c in 1e-10f64..1e-8, k in 0.1f64..10.0) {
        let p = PvdfParams { capacitance: c, ..PvdfParams::default() };
        let v = charge_voltage(q, &p).unwrap();
        prop_assert!((v - q / c).abs() <= 1e-12 * (1.0 + v.abs()));
        let vk = charge_voltage(k * q, &p).unwrap();
        prop_assert!((vk - k * v).abs() <= 1e-9 * (1.0 + vk.abs()));
    }

    #[test]
    fn csv_round_trip_is_exact(x in samples(100), dt_ms in 1u32..5) {
        let ts = TimeSeries::new(0.0, dt_ms as f64 * 1e-3, x, Unit::Volts).unwrap();
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        if ts.len() >= 2 {
            let back = TimeSeries::read_csv(&buf[..]).unwrap();
            prop_assert_eq!(back.values(), ts.values());
            prop_assert!((back.dt() - ts.dt()).abs() < 1e-9);
        }
    }
}

#[test]
fn malformed_csv_names_the_row() {
    let text = "t,value,unit\n0.000,1.0,V\n0.001,oops,V\n0.002,1.0,V\n";
    let err = TimeSeries::read_csv(text.as_bytes()).unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
}
