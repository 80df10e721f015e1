//! Diagonalization of the single-mode SQUID Hamiltonian and flux sweeps.

use serde::{Deserialize, Serialize};

use crate::charge::{banded_hamiltonian, hamiltonian_matrix, initial_cutoff, ChargeBasisSpec};
use crate::error::{Error, Result};
use crate::linalg::{eigensolve, EigenSystem};
use crate::parallel::par_map;
use crate::potential::HarmonicPotential;
use crate::squid::{build_squid_potential, SquidParams};

/// Transition tolerance used by the cutoff-doubling rule, GHz.
pub const CUTOFF_TOLERANCE: f64 = 1e-7;
const MAX_CUTOFF: usize = 4096;

#[derive(Debug, Clone)]
pub struct DeviceEigensystem {
    pub params: SquidParams,
    pub basis: ChargeBasisSpec,
    pub system: EigenSystem,
}

/// Lowest `levels` eigenvalues (GHz) through the banded solver.
pub fn device_levels(params: &SquidParams, basis: ChargeBasisSpec, levels: usize) -> Result<Vec<f64>> {
    let u = build_squid_potential(params)?;
    let h = banded_hamiltonian(&u, params.e_c, params.n_g, basis)?;
    if levels == 0 || levels > h.dimension() {
        return Err(Error::InvalidParameter(format!(
            "requested {levels} levels from a basis of dimension {}",
            h.dimension()
        )));
    }
    Ok(h.lowest_eigenvalues(levels))
}

/// Lowest `levels` eigenpairs in the charge basis through the dense solver.
pub fn solve_device(params: &SquidParams, basis: ChargeBasisSpec, levels: usize) -> Result<DeviceEigensystem> {
    let u = build_squid_potential(params)?;
    let h = hamiltonian_matrix(&u, params.e_c, params.n_g, basis)?;
    let system = eigensolve(&h, levels)?;
    Ok(DeviceEigensystem {
        params: *params,
        basis,
        system,
    })
}

fn max_transition_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| ((x - a[0]) - (y - b[0])).abs())
        .fold(0.0, f64::max)
}

/// Smallest cutoff, starting from the rule of thumb and doubling, for which
/// doubling again moves no transition of any probe point by more than `tolerance`.
pub fn converged_basis(probes: &[SquidParams], levels: usize, tolerance: f64) -> Result<ChargeBasisSpec> {
    let e_c = probes.iter().map(|p| p.e_c).fold(f64::INFINITY, f64::min);
    let e_j = probes.iter().map(|p| p.e_j_sigma()).fold(0.0, f64::max);
    let mut basis = ChargeBasisSpec::new(initial_cutoff(e_j, e_c));
    let levels = levels.max(2);
    while basis.cutoff <= MAX_CUTOFF {
        let finer = basis.doubled();
        let mut worst = 0.0f64;
        for p in probes {
            let a = device_levels(p, basis, levels)?;
            let b = device_levels(p, finer, levels)?;
            worst = worst.max(max_transition_change(&a, &b));
        }
        if worst < tolerance {
            basis.converged = true;
            return Ok(basis);
        }
        basis = finer;
    }
    Err(Error::EigenNoConvergence {
        dimension: 2 * MAX_CUTOFF + 1,
        detail: "charge cutoff did not converge".into(),
    })
}

/// Probe points for the cutoff rule: the bias with the largest first harmonic
/// on each requested offset charge.
pub fn cutoff_probes(params: &SquidParams, fluxes: &[f64], ngs: &[f64]) -> Vec<SquidParams> {
    let strongest = fluxes
        .iter()
        .copied()
        .max_by(|a, b| {
            let ea = params.with_flux(*a).effective_e_j1();
            let eb = params.with_flux(*b).effective_e_j1();
            ea.total_cmp(&eb)
        })
        .unwrap_or(0.0);
    ngs.iter().map(|&ng| params.with_flux(strongest).with_ng(ng)).collect()
}

/// A charge-basis problem 4E_C(n − n_g)² + U(φ) with an arbitrary potential.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeProblem {
    pub potential: HarmonicPotential,
    pub e_c: f64,
    pub n_g: f64,
}

impl SingleModeProblem {
    pub fn levels(&self, basis: ChargeBasisSpec, levels: usize) -> Result<Vec<f64>> {
        let h = banded_hamiltonian(&self.potential, self.e_c, self.n_g, basis)?;
        if levels == 0 || levels > h.dimension() {
            return Err(Error::InvalidParameter(format!(
                "requested {levels} levels from a basis of dimension {}",
                h.dimension()
            )));
        }
        Ok(h.lowest_eigenvalues(levels))
    }
}

/// Smallest cutoff whose lowest transitions lie within `tolerance` of a
/// doubling-converged reference for every problem.
pub fn smallest_cutoff(problems: &[SingleModeProblem], levels: usize, tolerance: f64) -> Result<ChargeBasisSpec> {
    if problems.is_empty() {
        return Err(Error::InvalidParameter("no problems given".into()));
    }
    let levels = levels.max(2);
    let e_c = problems.iter().map(|p| p.e_c).fold(f64::INFINITY, f64::min);
    let e_j = problems.iter().map(|p| p.potential.amplitude()).fold(0.0, f64::max);
    let order = problems
        .iter()
        .map(|p| p.potential.max_order())
        .max()
        .unwrap_or(1)
        .max(1) as usize;
    let mut reference = ChargeBasisSpec::new(initial_cutoff(e_j, e_c));
    let reference_levels = loop {
        if reference.cutoff > MAX_CUTOFF {
            return Err(Error::EigenNoConvergence {
                dimension: 2 * MAX_CUTOFF + 1,
                detail: "charge cutoff did not converge".into(),
            });
        }
        let finer = reference.doubled();
        let a: Vec<Vec<f64>> = problems
            .iter()
            .map(|p| p.levels(reference, levels))
            .collect::<Result<_>>()?;
        let b: Vec<Vec<f64>> = problems
            .iter()
            .map(|p| p.levels(finer, levels))
            .collect::<Result<_>>()?;
        let worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| max_transition_change(x, y))
            .fold(0.0, f64::max);
        if worst < 0.1 * tolerance {
            break b;
        }
        reference = finer;
    };
    let mut cutoff = order.max(levels.div_ceil(2));
    loop {
        let basis = ChargeBasisSpec::new(cutoff);
        let mut worst = 0.0f64;
        for (p, r) in problems.iter().zip(&reference_levels) {
            worst = worst.max(max_transition_change(&p.levels(basis, levels)?, r));
        }
        if worst < tolerance {
            return Ok(ChargeBasisSpec {
                cutoff,
                converged: true,
            });
        }
        cutoff += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub flux_phi0: f64,
    pub ng: f64,
    pub i: usize,
    pub j: usize,
    pub omega_ghz: f64,
}

/// Transition table ω_ij = λ_i − λ_j for j ∈ {0, 1}, i > j, on a flux × n_g grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub fluxes: Vec<f64>,
    pub ngs: Vec<f64>,
    pub levels: usize,
    pub basis: ChargeBasisSpec,
    pub rows: Vec<TransitionRow>,
}

impl Spectrum {
    pub fn omega(&self, flux_index: usize, ng_index: usize, i: usize, j: usize) -> f64 {
        let per_point = 2 * self.levels - 3;
        let base = (flux_index * self.ngs.len() + ng_index) * per_point;
        let offset = if j == 0 { i - 1 } else { self.levels - 1 + i - 2 };
        let row = &self.rows[base + offset];
        debug_assert!(row.i == i && row.j == j);
        row.omega_ghz
    }
}

fn rows_for(flux: f64, ng: f64, levels: &[f64]) -> Vec<TransitionRow> {
    let mut rows = Vec::with_capacity(2 * levels.len());
    for j in 0..2 {
        for i in j + 1..levels.len() {
            rows.push(TransitionRow {
                flux_phi0: flux,
                ng,
                i,
                j,
                omega_ghz: levels[i] - levels[j],
            });
        }
    }
    rows
}

/// Sweeps flux (units of Φ₀) and offset charge; `params`' own bias is ignored.
pub fn transition_spectrum(params: &SquidParams, fluxes: &[f64], ngs: &[f64], levels: usize) -> Result<Spectrum> {
    if fluxes.is_empty() || ngs.is_empty() {
        return Err(Error::InvalidParameter(
            "flux grid and n_g list must be non-empty".into(),
        ));
    }
    if levels < 2 {
        return Err(Error::InvalidParameter("at least two levels are required".into()));
    }
    params.validate()?;
    let basis = converged_basis(&cutoff_probes(params, fluxes, ngs), levels, CUTOFF_TOLERANCE)?;
    transition_spectrum_with_basis(params, fluxes, ngs, levels, basis)
}

pub fn transition_spectrum_with_basis(
    params: &SquidParams,
    fluxes: &[f64],
    ngs: &[f64],
    levels: usize,
    basis: ChargeBasisSpec,
) -> Result<Spectrum> {
    let points: Vec<(f64, f64)> = fluxes
        .iter()
        .flat_map(|&f| ngs.iter().map(move |&ng| (f, ng)))
        .collect();
    let results = par_map(&points, |&(flux, ng)| {
        let p = params.with_flux(flux).with_ng(ng);
        device_levels(&p, basis, levels)
            .map(|lv| rows_for(flux, ng, &lv))
            .map_err(|e| e.at(flux, ng))
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(Spectrum {
        fluxes: fluxes.to_vec(),
        ngs: ngs.to_vec(),
        levels,
        basis,
        rows,
    })
}

/// Evenly spaced grid including both end points.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm_inf, orthonormality_defect, residual};
    use crate::squid::{alpha_from_inductance, asymmetry_to_d_ej};

    fn six_micron() -> SquidParams {
        SquidParams::new(
            0.0956,
            231.0,
            asymmetry_to_d_ej(0.0033),
            alpha_from_inductance(231.0, 10.0, 0.0),
        )
    }

    #[test]
    fn free_rotor_transition() {
        let p = SquidParams::new(0.0956, 0.0, 0.0, 0.0);
        let s = transition_spectrum(&p, &[0.5], &[0.0], 3).unwrap();
        assert!((s.omega(0, 0, 1, 0) - 4.0 * 0.0956).abs() < 1e-9);
    }

    #[test]
    fn banded_and_dense_levels_agree() {
        let p = six_micron().with_flux(0.47).with_ng(0.2);
        let basis = ChargeBasisSpec::new(30);
        let fast = device_levels(&p, basis, 6).unwrap();
        let dense = solve_device(&p, basis, 6).unwrap();
        for (a, b) in fast.iter().zip(&dense.system.energies) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn device_eigensystem_invariants() {
        let p = six_micron().with_flux(0.5);
        let basis = ChargeBasisSpec::new(30);
        let sys = solve_device(&p, basis, 8).unwrap();
        let h = hamiltonian_matrix(&build_squid_potential(&p).unwrap(), p.e_c, p.n_g, basis).unwrap();
        assert!(orthonormality_defect(&sys.system.states) < 1e-10);
        assert!(residual(&h, &sys.system) <= 1e-8 * norm_inf(&h));
    }

    #[test]
    fn spectrum_layout() {
        let p = six_micron();
        let fluxes = linspace(0.48, 0.52, 5);
        let s = transition_spectrum(&p, &fluxes, &[0.0, 0.5], 4).unwrap();
        assert_eq!(s.rows.len(), 5 * 2 * (3 + 2));
        assert!(s.rows.iter().all(|r| r.j > 0 || r.omega_ghz >= 0.0));
        assert!(s.basis.converged);
        let r = s.rows[7];
        assert_eq!(s.omega(0, 1, r.i, r.j), r.omega_ghz);
    }

    #[test]
    fn smallest_cutoff_is_accurate() {
        let p = six_micron().with_flux(0.45);
        let problem = SingleModeProblem {
            potential: build_squid_potential(&p).unwrap(),
            e_c: p.e_c,
            n_g: 0.0,
        };
        let basis = smallest_cutoff(std::slice::from_ref(&problem), 5, 1e-6).unwrap();
        assert!(basis.cutoff < 24);
        let a = problem.levels(basis, 5).unwrap();
        let b = problem.levels(ChargeBasisSpec::new(60), 5).unwrap();
        assert!(max_transition_change(&a, &b) < 1e-6);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
