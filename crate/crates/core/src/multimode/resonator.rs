use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{eigensolve, EigenSystem};
use crate::spectrum::DeviceEigensystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorCoupling {
    /// GHz
    pub omega_r: f64,
    /// GHz
    pub g_c: f64,
    pub device_levels: usize,
    pub photons: usize,
}

/// Device ⊗ resonator Hamiltonian in the product of the bare device
/// eigenbasis and the Fock basis, index `level * photons + photon`.
#[derive(Debug, Clone)]
pub struct DressedSystem {
    pub coupling: ResonatorCoupling,
    /// Bare device energies relative to the ground state, GHz.
    pub bare_energies: Vec<f64>,
    pub hamiltonian: Mat<c64>,
}

/// ⟨a|n̂ − n_g|b⟩ for the device eigenvectors.
pub fn charge_matrix_elements(device: &DeviceEigensystem, levels: usize) -> Mat<c64> {
    let basis = device.basis;
    let states = &device.system.states;
    Mat::from_fn(levels, levels, |a, b| {
        let mut acc = c64::new(0.0, 0.0);
        for m in 0..basis.dimension() {
            acc += states[(m, a)].conj() * states[(m, b)] * (basis.charge(m) - device.params.n_g);
        }
        acc
    })
}

pub fn coupled_resonator_hamiltonian(device: &DeviceEigensystem, coupling: ResonatorCoupling) -> Result<DressedSystem> {
    ensure_finite("omega_r", coupling.omega_r)?;
    ensure_finite("g_c", coupling.g_c)?;
    if coupling.photons < 3 {
        return Err(Error::InvalidParameter(format!(
            "photon cutoff must be at least 3, got {}",
            coupling.photons
        )));
    }
    let levels = coupling.device_levels;
    if levels == 0 || levels > device.system.len() {
        return Err(Error::InvalidParameter(format!(
            "{levels} device levels requested, {} available",
            device.system.len()
        )));
    }
    let e = &device.system.energies;
    let bare_energies: Vec<f64> = e[..levels].iter().map(|x| x - e[0]).collect();
    let n = charge_matrix_elements(device, levels);
    let p = coupling.photons;
    let dim = levels * p;
    let mut h = Mat::<c64>::zeros(dim, dim);
    for a in 0..levels {
        for m in 0..p {
            h[(a * p + m, a * p + m)] = c64::new(bare_energies[a] + coupling.omega_r * m as f64, 0.0);
        }
    }
    if coupling.g_c != 0.0 {
        for a in 0..levels {
            for b in 0..levels {
                for m in 0..p - 1 {
                    // g n_ab √(m+1) |a, m+1⟩⟨b, m| and its adjoint
                    let z = n[(a, b)] * (coupling.g_c * ((m + 1) as f64).sqrt());
                    h[(a * p + m + 1, b * p + m)] += z;
                    h[(b * p + m, a * p + m + 1)] += z.conj();
                }
            }
        }
    }
    Ok(DressedSystem {
        coupling,
        bare_energies,
        hamiltonian: h,
    })
}

impl DressedSystem {
    pub fn index(&self, level: usize, photon: usize) -> usize {
        level * self.coupling.photons + photon
    }

    pub fn solve(&self) -> Result<EigenSystem> {
        eigensolve(&self.hamiltonian, self.hamiltonian.nrows())
    }

    /// Population of the highest retained Fock state in dressed state `k`.
    pub fn photon_tail(&self, system: &EigenSystem, k: usize) -> f64 {
        let p = self.coupling.photons;
        (0..self.coupling.device_levels)
            .map(|a| system.states[(a * p + p - 1, k)].norm_sqr())
            .sum()
    }
}

/// Dressed state with the largest overlap probability on bare state `bare`.
/// The assignment must exceed 1/2 and be at least twice the runner-up.
pub fn identify_dressed_state(system: &EigenSystem, bare: usize) -> Result<usize> {
    if bare >= system.dimension() {
        return Err(Error::InvalidParameter(format!("bare index {bare} out of range")));
    }
    let mut best = (0usize, -1.0f64);
    let mut runner_up = 0.0f64;
    for k in 0..system.len() {
        let w = system.states[(bare, k)].norm_sqr();
        if w > best.1 {
            runner_up = best.1.max(0.0);
            best = (k, w);
        } else if w > runner_up {
            runner_up = w;
        }
    }
    if best.1 <= 0.5 || runner_up >= 0.5 * best.1 {
        return Err(Error::AmbiguousAssignment {
            best: best.1,
            runner_up,
        });
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::ChargeBasisSpec;
    use crate::spectrum::solve_device;
    use crate::squid::SquidParams;

    fn device(e_j: f64) -> DeviceEigensystem {
        let p = SquidParams::new(0.2, e_j, 0.0, 0.0);
        solve_device(&p, ChargeBasisSpec::new(20), 8).unwrap()
    }

    fn coupling(g_c: f64) -> ResonatorCoupling {
        ResonatorCoupling {
            omega_r: 7.0,
            g_c,
            device_levels: 6,
            photons: 5,
        }
    }

    #[test]
    fn uncoupled_is_identity() {
        let d = device(10.0);
        let s = coupled_resonator_hamiltonian(&d, coupling(0.0)).unwrap();
        let eig = s.solve().unwrap();
        let mut sums: Vec<f64> = (0..6)
            .flat_map(|a| (0..5).map(move |m| (a, m)))
            .map(|(a, m)| s.bare_energies[a] + 7.0 * m as f64)
            .collect();
        sums.sort_by(f64::total_cmp);
        for (x, y) in eig.energies.iter().zip(&sums) {
            assert!((x - y).abs() < 1e-12);
        }
        for a in 0..6 {
            for m in 0..5 {
                let k = identify_dressed_state(&eig, s.index(a, m)).unwrap();
                assert!((eig.energies[k] - s.bare_energies[a] - 7.0 * m as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weak_coupling_bijection() {
        let d = device(10.0);
        let s = coupled_resonator_hamiltonian(&d, coupling(0.01)).unwrap();
        let eig = s.solve().unwrap();
        let mut seen: Vec<usize> = (0..5)
            .map(|a| identify_dressed_state(&eig, s.index(a, 0)).unwrap())
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 5);
        assert!(s.photon_tail(&eig, seen[0]) < 1e-6);
    }

    #[test]
    fn resonant_assignment_is_ambiguous() {
        let d = device(10.0);
        let mut c = coupling(0.02);
        c.omega_r = d.system.energies[1] - d.system.energies[0];
        let s = coupled_resonator_hamiltonian(&d, c).unwrap();
        let eig = s.solve().unwrap();
        assert!(matches!(
            identify_dressed_state(&eig, s.index(1, 0)),
            Err(Error::AmbiguousAssignment { .. })
        ));
    }

    #[test]
    fn photon_cutoff_bound() {
        let mut c = coupling(0.01);
        c.photons = 2;
        assert!(coupled_resonator_hamiltonian(&device(10.0), c).is_err());
    }
}
