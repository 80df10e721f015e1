use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multimode::{
    charge_matrix_elements, coupled_resonator_hamiltonian, identify_dressed_state, ResonatorCoupling,
};
use crate::parallel::par_map;
use crate::spectrum::{converged_basis, cutoff_probes, solve_device, DeviceEigensystem, CUTOFF_TOLERANCE};
use crate::squid::SquidParams;

pub const DEFAULT_LEVEL_CAP: usize = 15;
pub const DEFAULT_PHOTONS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersiveShift {
    /// GHz
    pub shift: f64,
    pub warnings: Vec<String>,
}

/// Second-order resonator pull for device state `state`:
/// g² Σ_{i≠s} |⟨i|n̂|s⟩|² (−2ω_is)/(ω_is² − ω_r²), summed over the lowest `level_cap` levels.
pub fn dispersive_shift_of(
    device: &DeviceEigensystem,
    state: usize,
    omega_r: f64,
    g_c: f64,
    level_cap: usize,
) -> Result<DispersiveShift> {
    if level_cap > device.system.len() || state >= level_cap {
        return Err(Error::InvalidParameter(format!(
            "level cap {level_cap} needs that many solved levels ({} available) and must exceed the state index",
            device.system.len()
        )));
    }
    let e = &device.system.energies;
    let n = charge_matrix_elements(device, level_cap);
    let mut shift = 0.0;
    let mut warnings = Vec::new();
    for i in (0..level_cap).filter(|&i| i != state) {
        let w = e[i] - e[state];
        if (w.abs() - omega_r).abs() < 10.0 * g_c.abs() {
            warnings.push(format!(
                "transition {i}-{state} at {:.4} GHz lies within 10 g_c of the resonator",
                w.abs()
            ));
        }
        shift += n[(i, state)].norm_sqr() * (-2.0 * w) / (w * w - omega_r * omega_r);
    }
    Ok(DispersiveShift {
        shift: g_c * g_c * shift,
        warnings,
    })
}

/// Ground-state resonator pull.
pub fn dispersive_shift(
    device: &DeviceEigensystem,
    omega_r: f64,
    g_c: f64,
    level_cap: usize,
) -> Result<DispersiveShift> {
    dispersive_shift_of(device, 0, omega_r, g_c, level_cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersiveMethod {
    Perturbative,
    ExactDressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveOptions {
    pub level_cap: usize,
    pub photons: usize,
    pub device_state: usize,
}

impl Default for DispersiveOptions {
    fn default() -> Self {
        Self {
            level_cap: DEFAULT_LEVEL_CAP,
            photons: DEFAULT_PHOTONS,
            device_state: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersiveReport {
    pub fluxes: Vec<f64>,
    /// GHz
    pub omega_r: f64,
    /// GHz
    pub g_c: f64,
    /// GHz, one per flux.
    pub shifts: Vec<f64>,
    pub device_state: usize,
    pub method: DispersiveMethod,
    pub warnings: Vec<String>,
}

/// Exact resonator pull E(s, 1) − E(s, 0) − ω_r and the shift of the device
/// transition ω_s0 from the dressed spectrum.
pub fn dressed_shifts(
    device: &DeviceEigensystem,
    omega_r: f64,
    g_c: f64,
    options: DispersiveOptions,
) -> Result<(f64, f64, Vec<String>)> {
    let coupling = ResonatorCoupling {
        omega_r,
        g_c,
        device_levels: options.level_cap,
        photons: options.photons,
    };
    let dressed = coupled_resonator_hamiltonian(device, coupling)?;
    let eig = dressed.solve()?;
    let s = options.device_state;
    let ground = identify_dressed_state(&eig, dressed.index(0, 0))?;
    let s0 = identify_dressed_state(&eig, dressed.index(s, 0))?;
    let s1 = identify_dressed_state(&eig, dressed.index(s, 1))?;
    let mut warnings = Vec::new();
    for k in [ground, s0, s1] {
        let tail = dressed.photon_tail(&eig, k);
        if tail > 1e-6 {
            warnings.push(format!("photon cutoff population {tail:.2e} in dressed state {k}"));
        }
    }
    let e = &eig.energies;
    let pull = e[s1] - e[s0] - omega_r;
    let device_shift = (e[s0] - e[ground]) - dressed.bare_energies[s];
    Ok((pull, device_shift, warnings))
}

pub fn dispersive_report(
    params: &SquidParams,
    fluxes: &[f64],
    omega_r: f64,
    g_c: f64,
    method: DispersiveMethod,
    options: DispersiveOptions,
) -> Result<DispersiveReport> {
    if fluxes.is_empty() {
        return Err(Error::InvalidParameter("flux grid must be non-empty".into()));
    }
    params.validate()?;
    let basis = converged_basis(
        &cutoff_probes(params, fluxes, &[params.n_g]),
        options.level_cap,
        CUTOFF_TOLERANCE,
    )?;
    let results = par_map(fluxes, |&flux| {
        let device =
            solve_device(&params.with_flux(flux), basis, options.level_cap).map_err(|e| e.at(flux, params.n_g))?;
        match method {
            DispersiveMethod::Perturbative => {
                let r = dispersive_shift_of(&device, options.device_state, omega_r, g_c, options.level_cap)?;
                Ok((r.shift, r.warnings))
            }
            DispersiveMethod::ExactDressed => {
                let (pull, _, warnings) =
                    dressed_shifts(&device, omega_r, g_c, options).map_err(|e| e.at(flux, params.n_g))?;
                Ok((pull, warnings))
            }
        }
    });
    let mut shifts = Vec::with_capacity(fluxes.len());
    let mut warnings = Vec::new();
    for (flux, r) in fluxes.iter().zip(results) {
        let (s, w): (f64, Vec<String>) = r?;
        shifts.push(s);
        warnings.extend(w.into_iter().map(|w| format!("flux {flux}: {w}")));
    }
    Ok(DispersiveReport {
        fluxes: fluxes.to_vec(),
        omega_r,
        g_c,
        shifts,
        device_state: options.device_state,
        method,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::ChargeBasisSpec;

    #[test]
    fn zero_coupling() {
        let p = SquidParams::new(0.2, 10.0, 0.0, 0.0);
        let d = solve_device(&p, ChargeBasisSpec::new(20), 15).unwrap();
        assert_eq!(dispersive_shift(&d, 7.0, 0.0, 15).unwrap().shift, 0.0);
        let (pull, shift, _) = dressed_shifts(&d, 7.0, 0.0, DispersiveOptions::default()).unwrap();
        assert!(pull.abs() < 1e-12 && shift.abs() < 1e-12);
    }

    #[test]
    fn two_level_limit() {
        let p = SquidParams::new(0.2, 10.0, 0.0, 0.0);
        let d = solve_device(&p, ChargeBasisSpec::new(20), 15).unwrap();
        let g = 0.005;
        let w = d.system.energies[1] - d.system.energies[0];
        let omega_r = w + 1.0;
        let n01 = charge_matrix_elements(&d, 2)[(1, 0)].norm_sqr();
        // two-level pull −g²|n01|²/(ω_10 − ω_r), counter-rotating part dropped
        let tls = -g * g * n01 / (w - omega_r) - g * g * n01 / (w + omega_r);
        let r = dispersive_shift(&d, omega_r, g, 2).unwrap();
        assert!((r.shift / tls - 1.0).abs() < 1e-12);
        let opts = DispersiveOptions {
            level_cap: 2,
            photons: 8,
            device_state: 0,
        };
        let (pull, _, _) = dressed_shifts(&d, omega_r, g, opts).unwrap();
        assert!((pull / r.shift - 1.0).abs() < 0.05);
    }
}
