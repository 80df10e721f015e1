use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use squid_harmonics::devices::chip_a;
use squid_harmonics::error::Error;
use squid_harmonics::fitting::*;
use squid_harmonics::squid::SquidParams;

fn small_plan() -> SynthPlan {
    SynthPlan {
        near: vec![0.495, 0.5, 0.505],
        away: vec![0.45, 0.465],
        ngs: vec![0.0, 0.5],
        max_level: 2,
        include_j1: true,
    }
}

fn three_micron() -> SquidParams {
    chip_a(3).unwrap().squid_params()
}

fn line_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 4..12)
        .prop_filter("needs spread", |v| {
            let mut xs: Vec<f64> = v.iter().map(|p| p.0).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            xs.len() >= 3
        })
        .prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(k, (x, e))| (x, 0.7 * x + 0.2 * e + 0.01 * k as f64))
                .collect()
        })
}

fn ratio_points(xy: &[(f64, f64)], sx: f64, sy: f64) -> Vec<RatioPoint> {
    xy.iter()
        .map(|&(x, y)| RatioPoint {
            x,
            y,
            sigma_x: sx,
            sigma_y: sy,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cost_ignores_record_order(seed in any::<u64>(), bump in 0.99f64..1.01) {
        let data = synthesize(&three_micron(), &small_plan(), 0.003, 5).unwrap();
        let mut shuffled = data.records.clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        shuffled.shuffle(&mut rng);
        let other = TransitionDataset::new(shuffled, data.provenance.clone()).unwrap();
        let mut x = FitParams::from(&three_micron());
        x.e_c *= bump;
        prop_assert_eq!(spectrum_cost(&x, &data).unwrap().to_bits(), spectrum_cost(&x, &other).unwrap().to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthogonal_regression_is_axis_symmetric(xy in line_points(), s in 0.01f64..1.0) {
        let f = deming_fit(&ratio_points(&xy, s, s)).unwrap();
        let swapped: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (y, x)).collect();
        let g = deming_fit(&ratio_points(&swapped, s, s)).unwrap();
        prop_assert!((f.slope * g.slope - 1.0).abs() < 1e-8, "{} vs {}", f.slope, g.slope);
    }

    #[test]
    fn regression_is_scale_equivariant(xy in line_points(), sx in 0.01f64..1.0, sy in 0.01f64..1.0) {
        let f = deming_fit(&ratio_points(&xy, sx, sy)).unwrap();
        let scaled: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (10.0 * x, y)).collect();
        let g = deming_fit(&ratio_points(&scaled, 10.0 * sx, sy)).unwrap();
        prop_assert!((g.slope - 0.1 * f.slope).abs() <= 1e-10 * f.slope.abs());
        prop_assert!((g.intercept - f.intercept).abs() <= 1e-10 * f.intercept.abs().max(1.0));
    }

    #[test]
    fn uniform_weights_reduce_to_closed_form(xy in line_points(), sx in 0.01f64..1.0, sy in 0.01f64..1.0) {
        let f = deming_fit(&ratio_points(&xy, sx, sy)).unwrap();
        let (m, b) = deming_closed_form(&xy, (sy / sx).powi(2)).unwrap();
        prop_assert!((f.slope - m).abs() <= 1e-9 * m.abs().max(1.0));
        prop_assert!((f.intercept - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
}

#[test]
fn charging_energy_is_locally_identifiable() {
    let p = chip_a(6).unwrap().squid_params();
    let data = synthesize(&p, &SynthPlan::default(), 0.0, 1).unwrap();
    let x = FitParams::from(&p);
    let base = spectrum_cost(&x, &data).unwrap();
    assert!(base < 1e-12);
    let mut y = x;
    y.e_c *= 1.01;
    assert!(spectrum_cost(&y, &data).unwrap() > base);
}

#[test]
fn single_flux_is_unidentifiable() {
    let plan = SynthPlan {
        near: vec![0.5],
        away: vec![],
        ..small_plan()
    };
    let data = synthesize(&three_micron(), &plan, 0.0, 1).unwrap();
    let init = FitParams::from(&three_micron());
    let err = fit_spectrum(&data, init, &FitOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Unidentifiable(_)), "{err}");
}

#[test]
fn empty_dataset_is_rejected() {
    let err = TransitionDataset::new(vec![], DatasetProvenance::Measured).unwrap_err();
    assert!(matches!(err, Error::InvalidDataset(_)));
}

#[test]
fn fixed_seed_fit_is_reproducible() {
    let truth = three_micron();
    let data = synthesize(&truth, &small_plan(), 0.005, 11).unwrap();
    let t = FitParams::from(&truth);
    let init = FitParams::from_array([t.e_c * 1.02, t.e_j1_left * 0.98, t.d_ej, t.alpha * 1.1]);
    let options = FitOptions {
        seed: 42,
        ..FitOptions::default()
    };
    let a = fit_spectrum(&data, init, &options).unwrap();
    let b = fit_spectrum(&data, init, &options).unwrap();
    assert_eq!(a, b);
    assert!(a.diagnostics.converged);
    assert_eq!(a.diagnostics.start_costs.len(), 5);
}

#[test]
fn fit_rejects_initial_point_outside_bounds() {
    let data = synthesize(&three_micron(), &small_plan(), 0.0, 1).unwrap();
    let mut init = FitParams::from(&three_micron());
    init.alpha = 0.2;
    let err = fit_spectrum(&data, init, &FitOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter(_)));
}
