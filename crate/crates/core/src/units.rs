//! Physical constants and unit conversions.
//!
//! Energies are E/h in GHz, capacitances in fF, inductances in pH,
//! currents in μA and flux in units of the flux quantum.

use std::f64::consts::PI;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

const GHZ: f64 = 1e9;
const FEMTO: f64 = 1e-15;
const PICO: f64 = 1e-12;

/// e²/(2h) expressed as GHz·fF.
pub fn charging_constant() -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * PLANCK) / FEMTO / GHZ
}

/// (Φ₀/2π)²/h expressed as GHz·pH.
pub fn inductive_constant() -> f64 {
    let reduced = FLUX_QUANTUM / (2.0 * PI);
    reduced * reduced / PLANCK / PICO / GHZ
}

/// Critical-current equivalent of 1 GHz of Josephson energy, in μA.
pub fn current_per_ghz() -> f64 {
    2.0 * PI * PLANCK * GHZ / FLUX_QUANTUM * 1e6
}

pub fn charging_energy(capacitance_ff: f64) -> f64 {
    charging_constant() / capacitance_ff
}

pub fn capacitance(charging_energy_ghz: f64) -> f64 {
    charging_constant() / charging_energy_ghz
}

pub fn inductive_energy(inductance_ph: f64) -> f64 {
    inductive_constant() / inductance_ph
}

pub fn inductance(inductive_energy_ghz: f64) -> f64 {
    inductive_constant() / inductive_energy_ghz
}

/// Reduced phase 2πΦ/Φ₀ for a flux given in units of Φ₀.
pub fn flux_to_phase(flux_phi0: f64) -> f64 {
    2.0 * PI * flux_phi0
}

pub fn phase_to_flux(phase: f64) -> f64 {
    phase / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_constants() {
        assert!((charging_constant() - 19.3703).abs() < 1e-4);
        assert!((inductive_constant() - 163_462.0).abs() < 1.0);
        assert!((current_per_ghz() - 2.0134e-3).abs() < 1e-7);
    }

    #[test]
    fn inverse_pairs() {
        assert!((capacitance(charging_energy(73.0)) - 73.0).abs() < 1e-12);
        assert!((inductance(inductive_energy(10.0)) - 10.0).abs() < 1e-12);
        assert!((phase_to_flux(flux_to_phase(0.37)) - 0.37).abs() < 1e-15);
    }

    #[test]
    fn critical_current_of_244_ghz() {
        let ic = 244.0 * current_per_ghz();
        assert!((ic - 0.49).abs() < 0.005, "{ic}");
    }
}
