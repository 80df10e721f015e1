//! Charge-basis Hamiltonians H = 4E_C(n − n_g)² + U(φ), with e^{iφ}|n⟩ = |n+1⟩.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::BandedHermitian;
use crate::potential::HarmonicPotential;

/// Basis |n⟩, n ∈ [−N, N].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeBasisSpec {
    pub cutoff: usize,
    /// Set once doubling the cutoff has been shown not to move the
    /// requested eigenvalues beyond tolerance.
    pub converged: bool,
}

impl ChargeBasisSpec {
    pub fn new(cutoff: usize) -> Self {
        Self {
            cutoff,
            converged: false,
        }
    }

    pub fn dimension(&self) -> usize {
        2 * self.cutoff + 1
    }

    /// Charge n of basis index `index`.
    pub fn charge(&self, index: usize) -> f64 {
        index as f64 - self.cutoff as f64
    }

    pub fn doubled(&self) -> Self {
        Self::new(2 * self.cutoff.max(1))
    }
}

/// Starting cutoff max(24, ⌈4·(E_J/E_C)^{1/4}⌉).
pub fn initial_cutoff(e_j: f64, e_c: f64) -> usize {
    let ratio = (e_j.abs() / e_c).max(0.0);
    let n = (4.0 * ratio.powf(0.25)).ceil();
    (n as usize).max(24)
}

fn check(potential: &HarmonicPotential, e_c: f64, n_g: f64, basis: ChargeBasisSpec) -> Result<()> {
    ensure_finite("E_C", e_c)?;
    ensure_finite("n_g", n_g)?;
    if e_c <= 0.0 {
        return Err(Error::InvalidParameter(format!("E_C must be positive, got {e_c}")));
    }
    let order = potential.max_order();
    if order as usize > basis.cutoff || basis.cutoff == 0 {
        return Err(Error::CutoffTooSmall {
            order,
            cutoff: basis.cutoff,
        });
    }
    Ok(())
}

pub fn banded_hamiltonian(
    potential: &HarmonicPotential,
    e_c: f64,
    n_g: f64,
    basis: ChargeBasisSpec,
) -> Result<BandedHermitian> {
    check(potential, e_c, n_g, basis)?;
    let dim = basis.dimension();
    let diag = (0..dim)
        .map(|m| {
            let q = basis.charge(m) - n_g;
            4.0 * e_c * q * q
        })
        .collect();
    let mut h = BandedHermitian::new(diag, potential.max_order().max(1) as usize);
    for t in potential.terms() {
        let k = t.order as usize;
        let z = c64::from_polar(0.5 * t.coefficient, -(t.order as f64) * t.offset);
        for m in 0..dim - k {
            h.add_lower(k, m, z);
        }
    }
    Ok(h)
}

/// Dense Hamiltonian matrix in the charge basis.
pub fn hamiltonian_matrix(
    potential: &HarmonicPotential,
    e_c: f64,
    n_g: f64,
    basis: ChargeBasisSpec,
) -> Result<Mat<c64>> {
    Ok(banded_hamiltonian(potential, e_c, n_g, basis)?.to_dense())
}

/// Diagonal charge operator n̂.
pub fn charge_operator(basis: ChargeBasisSpec) -> Vec<f64> {
    (0..basis.dimension()).map(|m| basis.charge(m)).collect()
}
