//! Multimode circuit Hamiltonians assembled as dense tensor products.

mod circuits;
mod discrepancy;
mod mode;
mod resonator;

pub use circuits::{
    charge_cos, charge_sin, FullSquidCircuit, FullSquidDims, TransmonInductorCircuit, TransmonInductorDims,
    DEFAULT_DIMENSION_CAP,
};
pub use discrepancy::{full_squid_discrepancy, transmon_inductor_discrepancy, DiscrepancyRow, DiscrepancyTable};
pub use mode::{interior_max, mode_operators, trig_of_position, ModeOperators, Trig};
pub use resonator::{
    charge_matrix_elements, coupled_resonator_hamiltonian, identify_dressed_state, DressedSystem, ResonatorCoupling,
};

use faer::{c64, Mat};

use crate::error::{Error, Result};

/// One tensor factor of a product operator.
#[derive(Clone, Copy)]
pub(crate) enum Factor<'a> {
    Identity,
    Dense(&'a Mat<c64>),
    Diagonal(&'a [f64]),
}

/// Index map for a tensor product whose factors are stored in `order`
/// (first entry outermost).
#[derive(Debug, Clone)]
pub(crate) struct TensorLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl TensorLayout {
    pub(crate) fn new(dims: &[usize], order: &[usize], cap: usize) -> Result<Self> {
        let mut seen = vec![false; dims.len()];
        if order.len() != dims.len()
            || order
                .iter()
                .any(|&m| m >= dims.len() || std::mem::replace(&mut seen[m], true))
        {
            return Err(Error::InvalidParameter(format!(
                "mode order {order:?} is not a permutation"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > cap {
            return Err(Error::DimensionOverflow { dimension: total, cap });
        }
        let mut strides = vec![0; dims.len()];
        let mut s = 1;
        for &m in order.iter().rev() {
            strides[m] = s;
            s *= dims[m];
        }
        Ok(Self {
            dims: dims.to_vec(),
            strides,
        })
    }

    pub(crate) fn dimension(&self) -> usize {
        self.dims.iter().product()
    }

    #[cfg(test)]
    pub(crate) fn index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// h += scale · ⊗ factors (factors given in mode order, not layout order).
    pub(crate) fn add(&self, h: &mut Mat<c64>, scale: f64, factors: &[Factor]) {
        let entries: Vec<Vec<(usize, usize, c64)>> = factors
            .iter()
            .zip(&self.dims)
            .map(|(f, &d)| match f {
                Factor::Identity => (0..d).map(|i| (i, i, c64::new(1.0, 0.0))).collect(),
                Factor::Diagonal(v) => v
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(i, x)| (i, i, c64::new(*x, 0.0)))
                    .collect(),
                Factor::Dense(m) => {
                    let mut out = Vec::new();
                    for c in 0..d {
                        for r in 0..d {
                            let z = m[(r, c)];
                            if z != c64::new(0.0, 0.0) {
                                out.push((r, c, z));
                            }
                        }
                    }
                    out
                }
            })
            .collect();
        if entries.iter().any(|e| e.is_empty()) {
            return;
        }
        let modes = entries.len();
        let mut cursor = vec![0usize; modes];
        loop {
            let mut row = 0;
            let mut col = 0;
            let mut value = c64::new(scale, 0.0);
            for m in 0..modes {
                let (r, c, z) = entries[m][cursor[m]];
                row += r * self.strides[m];
                col += c * self.strides[m];
                value *= z;
            }
            h[(row, col)] += value;
            let mut m = modes;
            loop {
                if m == 0 {
                    return;
                }
                m -= 1;
                cursor[m] += 1;
                if cursor[m] < entries[m].len() {
                    break;
                }
                cursor[m] = 0;
            }
        }
    }
}
