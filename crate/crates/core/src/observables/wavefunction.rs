use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::charge::ChargeBasisSpec;
use crate::error::{Error, Result};
use crate::spectrum::{converged_basis, solve_device, CUTOFF_TOLERANCE};
use crate::squid::{build_squid_potential, SquidParams};

/// ψ(φ) = Σ_n c_n e^{inφ}/√(2π).
pub fn phase_amplitude(state: &[c64], basis: ChargeBasisSpec, phi: f64) -> c64 {
    let norm = (2.0 * PI).sqrt().recip();
    state
        .iter()
        .enumerate()
        .map(|(m, c)| c * c64::from_polar(norm, basis.charge(m) * phi))
        .sum()
}

/// ∫|ψ|² over one period, evaluated exactly by a uniform rule finer than the band limit.
pub fn density_norm(state: &[c64], basis: ChargeBasisSpec) -> f64 {
    let m = 2 * basis.dimension() + 2;
    let step = 2.0 * PI / m as f64;
    (0..m)
        .map(|j| phase_amplitude(state, basis, j as f64 * step).norm_sqr())
        .sum::<f64>()
        * step
}

/// ∫_a^b |ψ(φ)|² dφ in closed form.
pub fn probability_in_arc(state: &[c64], basis: ChargeBasisSpec, a: f64, b: f64) -> f64 {
    let d = state.len();
    let mut total = 0.0;
    for k in -(d as i64 - 1)..d as i64 {
        // Σ_m conj(c_m) c_{m+k} · ∫ e^{ikφ}
        let mut s = c64::new(0.0, 0.0);
        for m in 0..d {
            let j = m as i64 + k;
            if (0..d as i64).contains(&j) {
                s += state[m].conj() * state[j as usize];
            }
        }
        let integral = if k == 0 {
            c64::new(b - a, 0.0)
        } else {
            let kf = k as f64;
            (c64::from_polar(1.0, kf * b) - c64::from_polar(1.0, kf * a)) / c64::new(0.0, kf)
        };
        total += (s * integral).re;
    }
    let _ = basis;
    total / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialExport {
    pub phi: Vec<f64>,
    /// GHz
    pub potential: Vec<f64>,
    /// GHz
    pub energies: Vec<f64>,
    /// |ψ_i(φ)|² per level, rad⁻¹.
    pub densities: Vec<Vec<f64>>,
    pub basis: ChargeBasisSpec,
}

/// Samples U(φ) and the lowest `levels` phase-space densities on `phis`.
pub fn export_potential_and_wavefunctions(
    params: &SquidParams,
    phis: &[f64],
    levels: usize,
    basis: Option<ChargeBasisSpec>,
) -> Result<PotentialExport> {
    if phis.is_empty() || levels == 0 {
        return Err(Error::InvalidParameter(
            "need a non-empty grid and at least one level".into(),
        ));
    }
    let u = build_squid_potential(params)?;
    let basis = match basis {
        Some(b) => b,
        None => converged_basis(std::slice::from_ref(params), levels, CUTOFF_TOLERANCE)?,
    };
    let sys = solve_device(params, basis, levels)?.system;
    let densities = (0..levels)
        .map(|k| {
            let v = sys.state(k);
            phis.iter()
                .map(|&phi| phase_amplitude(&v, basis, phi).norm_sqr())
                .collect()
        })
        .collect();
    Ok(PotentialExport {
        phi: phis.to_vec(),
        potential: phis.iter().map(|&phi| u.value(phi)).collect(),
        energies: sys.energies,
        densities,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_probability_matches_quadrature() {
        let basis = ChargeBasisSpec::new(2);
        let v: Vec<c64> = [0.1, 0.5, 0.3, -0.2, 0.4]
            .iter()
            .enumerate()
            .map(|(k, x)| c64::new(*x, 0.1 * k as f64))
            .collect();
        let m = 200_000;
        let (a, b) = (0.3, 2.1);
        let h = (b - a) / m as f64;
        let mut quad = 0.0;
        for j in 0..m {
            let phi = a + (j as f64 + 0.5) * h;
            quad += phase_amplitude(&v, basis, phi).norm_sqr() * h;
        }
        assert!((probability_in_arc(&v, basis, a, b) - quad).abs() < 1e-9);
        let full = probability_in_arc(&v, basis, 0.0, 2.0 * PI);
        assert!((full - density_norm(&v, basis)).abs() < 1e-12);
    }

    #[test]
    fn free_rotor_ground_state_is_uniform() {
        let p = SquidParams::new(0.1, 0.0, 0.0, 0.0);
        let grid: Vec<f64> = (0..16).map(|k| k as f64 * 0.4).collect();
        let e = export_potential_and_wavefunctions(&p, &grid, 1, None).unwrap();
        for x in &e.densities[0] {
            assert!((x - 1.0 / (2.0 * PI)).abs() < 1e-12);
        }
    }
}
