use ess_core::{autocov_direct, autocov_fft};
use proptest::prelude::*;

fn max_dev(x: &[f64]) -> (f64, f64) {
    let lag = x.len() - 1;
    let d = autocov_direct(x, lag).unwrap();
    let f = autocov_fft(x, lag).unwrap();
    let dev = d
        .values
        .iter()
        .zip(&f.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (dev, d.values[0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fft_agrees_with_direct(x in prop::collection::vec(-1e3f64..1e3, 2..600)) {
        let (dev, r0) = max_dev(&x);
        prop_assert!(dev <= 1e-10 * r0.max(f64::MIN_POSITIVE) || dev == 0.0);
    }

    #[test]
    fn fft_agrees_on_offset_data(
        x in prop::collection::vec(-1.0f64..1.0, 2..300),
        offset in -1e6f64..1e6,
    ) {
        let y: Vec<f64> = x.iter().map(|v| v + offset).collect();
        let (dev, r0) = max_dev(&y);
        prop_assert!(dev <= 1e-10 * r0 || dev == 0.0);
    }
}

#[test]
fn constant_chain_is_exactly_zero() {
    for n in [2, 3, 17, 1000] {
        let x = vec![0.1; n];
        let f = autocov_fft(&x, n - 1).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0), "n={n}");
    }
}

#[test]
fn alternating_chain() {
    for n in [2usize, 5, 64, 1001] {
        let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let (dev, r0) = max_dev(&x);
        assert!(dev <= 1e-10 * r0, "n={n}");
    }
}
