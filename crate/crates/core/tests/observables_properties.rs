use proptest::prelude::*;
use squid_harmonics::devices::chip_a;
use squid_harmonics::observables::*;
use squid_harmonics::potential::{HarmonicPotential, HarmonicTerm};
use squid_harmonics::spectrum::{converged_basis, solve_device, CUTOFF_TOLERANCE};
use squid_harmonics::squid::{build_squid_potential, SquidParams};

fn diode_params() -> impl Strategy<Value = SquidParams> {
    (50.0f64..250.0, 0.002f64..0.05, 0.001f64..0.02, 0.40f64..0.60)
        .prop_map(|(e_j, d, a, flux)| SquidParams::new(0.1, e_j, d, a).with_flux(flux))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reversed_flux_reverses_the_diode(p in diode_params()) {
        let forward = rectification_efficiency(&build_squid_potential(&p).unwrap()).unwrap();
        let backward = rectification_efficiency(&build_squid_potential(&p.with_phase(-p.phi_ext)).unwrap()).unwrap();
        prop_assert!((forward + backward).abs() < 1e-8, "{forward} vs {backward}");
    }

    #[test]
    fn current_averages_to_zero(p in diode_params()) {
        let u = build_squid_potential(&p).unwrap();
        let grid = phase_grid(MIN_GRID);
        let i = supercurrent(&u, &grid).unwrap();
        let scale = i.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean = i.iter().sum::<f64>() / i.len() as f64;
        prop_assert!(mean.abs() < 1e-12 * scale);
    }

    #[test]
    fn derivative_matches_central_difference(p in diode_params(), phi in 0.1f64..6.2) {
        let u = build_squid_potential(&p).unwrap();
        let h = 1e-5;
        let fd = (u.value(phi + h) - u.value(phi - h)) / (2.0 * h);
        let exact = u.derivative(phi);
        prop_assert!((fd - exact).abs() <= 1e-8 * u.amplitude());
    }

    #[test]
    fn even_potentials_have_no_diode(e1 in 1.0f64..300.0, e2 in -20.0f64..20.0) {
        let single = HarmonicPotential::from_terms([HarmonicTerm::new(1, -e1, 0.0)]).unwrap();
        prop_assert!(rectification_efficiency(&single).unwrap().abs() < 1e-10);
        let even = HarmonicPotential::from_terms([HarmonicTerm::new(1, -e1, 0.0), HarmonicTerm::new(2, e2, 0.0)]).unwrap();
        prop_assert!(rectification_efficiency(&even).unwrap().abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn perturbative_pull_agrees_away_from_resonance(flux in 0.40f64..0.60) {
        let dev = chip_a(6).unwrap();
        let p = dev.squid_params().with_flux(flux);
        let basis = converged_basis(&[p], DEFAULT_LEVEL_CAP, CUTOFF_TOLERANCE).unwrap();
        let device = solve_device(&p, basis, DEFAULT_LEVEL_CAP).unwrap();
        let e = &device.system.energies;
        let g = dev.g_c();
        let detuning = (1..DEFAULT_LEVEL_CAP).map(|i| (e[i] - e[0] - dev.omega_r).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(detuning > 20.0 * g);
        let perturbative = dispersive_shift(&device, dev.omega_r, g, DEFAULT_LEVEL_CAP).unwrap().shift;
        let (exact, _, _) = dressed_shifts(&device, dev.omega_r, g, DispersiveOptions::default()).unwrap();
        prop_assert!((perturbative - exact).abs() <= 0.05 * exact.abs(), "{perturbative} vs {exact}");
    }
}
