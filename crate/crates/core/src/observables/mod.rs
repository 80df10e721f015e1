//! Dispersive shift, charge dispersion, wavefunctions and supercurrent.

mod current;
mod dispersive;
mod wavefunction;

pub use current::{
    current_extrema, diode_scan, phase_grid, rectification_efficiency, supercurrent, CurrentExtrema, DiodePoint,
    DiodeReport, EXTREMUM_GRID, MIN_GRID,
};
pub use dispersive::{
    dispersive_report, dispersive_shift, dispersive_shift_of, dressed_shifts, DispersiveMethod, DispersiveOptions,
    DispersiveReport, DispersiveShift, DEFAULT_LEVEL_CAP, DEFAULT_PHOTONS,
};
pub use wavefunction::{
    density_norm, export_potential_and_wavefunctions, phase_amplitude, probability_in_arc, PotentialExport,
};

use crate::charge::ChargeBasisSpec;
use crate::error::Result;
use crate::spectrum::{converged_basis, device_levels, CUTOFF_TOLERANCE};
use crate::squid::SquidParams;

/// |ω_{i0}(n_g = 1/2) − ω_{i0}(n_g = 0)| at `flux` (Φ₀), GHz.
pub fn charge_dispersion(params: &SquidParams, flux: f64, level: usize, basis: Option<ChargeBasisSpec>) -> Result<f64> {
    let a = params.with_flux(flux).with_ng(0.0);
    let b = params.with_flux(flux).with_ng(0.5);
    let levels = level + 1;
    let basis = match basis {
        Some(b) => b,
        None => converged_basis(&[a, b], levels, CUTOFF_TOLERANCE)?,
    };
    let la = device_levels(&a, basis, levels)?;
    let lb = device_levels(&b, basis, levels)?;
    Ok(((lb[level] - lb[0]) - (la[level] - la[0])).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotor_dispersion() {
        let p = SquidParams::new(0.0956, 0.0, 0.0, 0.0);
        let d = charge_dispersion(&p, 0.5, 1, None).unwrap();
        // degenerate pair at n_g = 1/2, so ω_10 drops from 4E_C to 0
        assert!((d - 4.0 * 0.0956).abs() < 1e-12);
    }
}
