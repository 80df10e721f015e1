use faer::{c64, Mat};
use squid_harmonics::charge::{hamiltonian_matrix, ChargeBasisSpec};
use squid_harmonics::potential::HarmonicPotential;
use squid_harmonics::spectrum::device_levels;
use squid_harmonics::squid::{build_squid_potential, SquidParams};
use std::f64::consts::PI;

// ⟨m|U|n⟩ = (1/2π)∮ U(φ) e^{i(n−m)φ} dφ, by a uniform rectangle rule that is
// exact for trigonometric polynomials of low degree.
fn dft_element(u: &HarmonicPotential, m: i64, n: i64, points: usize) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for j in 0..points {
        let phi = 2.0 * PI * j as f64 / points as f64;
        acc += c64::from_polar(u.value(phi), (n - m) as f64 * phi);
    }
    acc / points as f64
}

#[test]
fn matrix_elements_match_fourier_integrals() {
    let p = SquidParams::new(0.3, 40.0, 0.1, 0.02).with_flux(0.37).with_ng(0.21);
    let u = build_squid_potential(&p).unwrap();
    let basis = ChargeBasisSpec::new(6);
    let h = hamiltonian_matrix(&u, p.e_c, p.n_g, basis).unwrap();
    for r in 0..basis.dimension() {
        for c in 0..basis.dimension() {
            let (m, n) = (basis.charge(r) as i64, basis.charge(c) as i64);
            let mut expected = dft_element(&u, m, n, 64);
            if r == c {
                expected += 4.0 * p.e_c * (m as f64 - p.n_g).powi(2);
            }
            let got = h[(r, c)];
            assert!((got - expected).norm() < 1e-11, "({m},{n}): {got} vs {expected}");
        }
    }
}

// Finite-difference phase grid with periodic boundary; second order in the
// spacing, so two grids are Richardson-extrapolated.
fn grid_levels(u: &HarmonicPotential, e_c: f64, points: usize, levels: usize) -> Vec<f64> {
    let h = 2.0 * PI / points as f64;
    let t = 4.0 * e_c / (h * h);
    let m = Mat::<f64>::from_fn(points, points, |i, j| {
        let d = (i + points - j) % points;
        if i == j {
            2.0 * t + u.value(i as f64 * h)
        } else if d == 1 || d == points - 1 {
            -t
        } else {
            0.0
        }
    });
    let mut ev = m.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    ev.truncate(levels);
    ev
}

#[test]
fn levels_match_phase_grid_discretisation() {
    let p = SquidParams::new(1.0, 15.0, 0.2, 0.03).with_flux(0.31);
    let u = build_squid_potential(&p).unwrap();
    let coarse = grid_levels(&u, p.e_c, 300, 4);
    let fine = grid_levels(&u, p.e_c, 600, 4);
    let charge = device_levels(&p, ChargeBasisSpec::new(40), 4).unwrap();
    for k in 0..4 {
        let extrapolated = (4.0 * fine[k] - coarse[k]) / 3.0;
        assert!(
            (charge[k] - extrapolated).abs() < 1e-5 * charge[k].abs().max(1.0),
            "level {k}: {} vs {extrapolated}",
            charge[k]
        );
    }
}
