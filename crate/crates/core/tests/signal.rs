use proptest::prelude::*;
use vbip::signal::{generate_signal, reconstruction_success, SparseSignal};

#[test]
fn half_normal_mean() {
    let mut sum = 0.0;
    let mut count = 0usize;
    for seed in 0..4000u64 {
        let s = generate_signal(504, 25, seed).unwrap();
        assert_eq!(s.support_size(), 25);
        assert!(s.values().iter().all(|&v| v > 0.0));
        sum += s.values().iter().sum::<f64>();
        count += 25;
    }
    let mean = sum / count as f64;
    let expect = (2.0 / std::f64::consts::PI).sqrt();
    assert!((mean - expect).abs() / expect < 0.01, "mean {mean}");
}

#[test]
fn signal_file_round_trip() {
    let s = generate_signal(100, 12, 5).unwrap();
    let back = SparseSignal::from_text(&s.to_text()).unwrap();
    assert_eq!(back, s);
}

proptest! {
    #[test]
    fn generated_signals_are_valid(n in 1usize..200, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = (frac * n as f64) as usize;
        let s = generate_signal(n, k, seed).unwrap();
        prop_assert_eq!(s.len(), n);
        prop_assert_eq!(s.support_size(), k);
        prop_assert!(s.support().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.support().iter().all(|&i| i < n));
        prop_assert!(s.values().iter().all(|&v| v > 0.0 && v.is_finite()));
        prop_assert_eq!(&s, &generate_signal(n, k, seed).unwrap());
        prop_assert!(reconstruction_success(&s, &s.to_dense(), 1e-6).unwrap());
    }
}
