use serde::{Deserialize, Serialize};

use super::circuits::{FullSquidCircuit, FullSquidDims, TransmonInductorCircuit, TransmonInductorDims};
use crate::charge::{initial_cutoff, ChargeBasisSpec};
use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::spectrum::{converged_basis, device_levels, CUTOFF_TOLERANCE};
use crate::units::flux_to_phase;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub flux_phi0: f64,
    pub i: usize,
    /// GHz
    pub omega_full: f64,
    /// GHz
    pub omega_approx: f64,
}

impl DiscrepancyRow {
    pub fn difference(&self) -> f64 {
        (self.omega_full - self.omega_approx).abs()
    }
}

/// ω_{i0} of the full and reduced models, i = 1..=transitions per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyTable {
    pub fluxes: Vec<f64>,
    pub transitions: usize,
    pub rows: Vec<DiscrepancyRow>,
}

impl DiscrepancyTable {
    /// max_i |ω_full − ω_approx| per grid point.
    pub fn max_per_point(&self) -> Vec<f64> {
        self.rows
            .chunks(self.transitions)
            .map(|c| c.iter().map(DiscrepancyRow::difference).fold(0.0, f64::max))
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.max_per_point().into_iter().fold(0.0, f64::max)
    }
}

fn rows(flux: f64, full: &[f64], approx: &[f64]) -> Vec<DiscrepancyRow> {
    (1..full.len())
        .map(|i| DiscrepancyRow {
            flux_phi0: flux,
            i,
            omega_full: full[i] - full[0],
            omega_approx: approx[i] - approx[0],
        })
        .collect()
}

/// Full three-mode circuit against the second-harmonic model over a flux grid.
/// With `dims` unset the charge cutoff is trimmed on the reduced model.
pub fn full_squid_discrepancy(
    circuit: &FullSquidCircuit,
    fluxes: &[f64],
    n_g: f64,
    transitions: usize,
    dims: Option<FullSquidDims>,
) -> Result<DiscrepancyTable> {
    if fluxes.is_empty() || transitions == 0 {
        return Err(Error::InvalidParameter(
            "need at least one flux point and one transition".into(),
        ));
    }
    let levels = transitions + 1;
    let phases: Vec<f64> = fluxes.iter().map(|&f| flux_to_phase(f)).collect();
    let dims = match dims {
        Some(d) => d,
        None => circuit.default_dims(&phases, n_g, levels)?,
    };
    let probes = phases
        .iter()
        .map(|&phi| circuit.approximate_params(phi, n_g))
        .collect::<Result<Vec<_>>>()?;
    let basis = converged_basis(&probes, levels, CUTOFF_TOLERANCE)?;
    let work: Vec<usize> = (0..fluxes.len()).collect();
    let results = par_map(&work, |&k| {
        let full = circuit.levels(phases[k], n_g, &dims, levels)?;
        let approx = device_levels(&probes[k], basis, levels)?;
        Ok(rows(fluxes[k], &full, &approx))
    });
    let mut table = Vec::with_capacity(fluxes.len() * transitions);
    for (k, r) in results.into_iter().enumerate() {
        let r: Result<Vec<DiscrepancyRow>> = r;
        table.extend(r.map_err(|e| e.at(fluxes[k], n_g))?);
    }
    Ok(DiscrepancyTable {
        fluxes: fluxes.to_vec(),
        transitions,
        rows: table,
    })
}

/// Transmon with series inductor against −E_J cos φ + E_J²/(4E_L) cos 2φ.
pub fn transmon_inductor_discrepancy(
    circuit: &TransmonInductorCircuit,
    transitions: usize,
    dims: Option<TransmonInductorDims>,
) -> Result<DiscrepancyTable> {
    if transitions == 0 {
        return Err(Error::InvalidParameter("need at least one transition".into()));
    }
    let levels = transitions + 1;
    let dims = match dims {
        Some(d) => d,
        None => circuit.default_dims(levels)?,
    };
    let full = circuit.levels(&dims, levels)?;
    let problem = circuit.approximate_problem()?;
    let cutoff = initial_cutoff(circuit.e_j, problem.e_c).max(4 * dims.charge_cutoff);
    let approx = problem.levels(ChargeBasisSpec::new(cutoff), levels)?;
    Ok(DiscrepancyTable {
        fluxes: vec![0.0],
        transitions,
        rows: rows(0.0, &full, &approx),
    })
}
