use proptest::prelude::*;
use squid_harmonics::harmonics::{
    andreev_exact, andreev_series, inductive_series, reduction_oracle, HarmonicDecomposition, InductiveSeriesInput,
    Provenance, TransparencyDistribution,
};

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_ratio_is_linear_in_e_j1(e_l in 2000.0f64..20000.0, beta in 0.0f64..0.002) {
        let e_j: Vec<f64> = (1..=6).map(|k| 0.05 * e_l * k as f64 / 6.0).collect();
        let ratio: Vec<f64> = e_j
            .iter()
            .map(|&ej| reduction_oracle(ej, e_l, beta, 6).unwrap().second_harmonic_ratio())
            .collect();
        let slope = least_squares_slope(&e_j, &ratio);
        let expected = 1.0 / (4.0 * e_l);
        prop_assert!((slope / expected - 1.0).abs() < 0.01, "slope {slope} vs {expected}");
    }

    #[test]
    fn decomposition_round_trip(c in proptest::collection::vec(-50.0f64..50.0, 2..7)) {
        let d = HarmonicDecomposition::new(c.clone(), Provenance::Combined).unwrap();
        let back = HarmonicDecomposition::from_potential(&d.to_potential(), Provenance::Combined).unwrap();
        for (k, v) in c.iter().enumerate() {
            prop_assert!((back.coefficient(k + 1) - v).abs() < 1e-12 * 50.0);
        }
    }

    #[test]
    fn andreev_ratio_is_channel_count_free(t0 in 0.01f64..0.99, n in 1usize..40) {
        let one = TransparencyDistribution::uniform(44.0, n, t0).unwrap();
        let two = TransparencyDistribution::uniform(44.0, 2 * n, t0).unwrap();
        let a = andreev_series(&one, 3).unwrap().second_harmonic_ratio();
        let b = andreev_series(&two, 3).unwrap().second_harmonic_ratio();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        let a = andreev_exact(&one, 4).unwrap().second_harmonic_ratio();
        let b = andreev_exact(&two, 4).unwrap().second_harmonic_ratio();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}

#[test]
fn fourth_order_series_error_scales_as_fifth_power() {
    let e_l = 10_000.0;
    let err = |x: f64| {
        let e_j = x * e_l;
        let mut input = InductiveSeriesInput::new(e_j, e_l);
        input.order = 4;
        let s = inductive_series(input).unwrap().coefficient(2);
        let o = reduction_oracle(e_j, e_l, 0.0, 8).unwrap().coefficient(2);
        (s - o).abs()
    };
    let (small, large) = (err(0.02), err(0.04));
    assert!(large / small >= 16.0, "error ratio {}", large / small);
}
