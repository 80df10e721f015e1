use faer::{c64, Mat, Side};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{self_adjoint_defect, SELF_ADJOINT_TOLERANCE};

/// Truncated position and number operators of the quadratic mode
/// H₀ = 4E_c n̂² + ½E_l φ̂², built from ladder operators in the Fock basis.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub e_c: f64,
    pub e_l: f64,
    pub phi: Mat<c64>,
    pub n: Mat<c64>,
}

impl ModeOperators {
    pub fn dimension(&self) -> usize {
        self.phi.nrows()
    }

    pub fn phi_zpf(&self) -> f64 {
        (2.0 * self.e_c / self.e_l).powf(0.25)
    }

    pub fn n_zpf(&self) -> f64 {
        (self.e_l / (32.0 * self.e_c)).powf(0.25)
    }

    /// sqrt(8 E_c E_l), GHz.
    pub fn frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }

    /// Exact oscillator energies ω(k + ½) of the Fock states.
    pub fn energies(&self) -> Vec<f64> {
        let w = self.frequency();
        (0..self.dimension()).map(|k| w * (k as f64 + 0.5)).collect()
    }

    /// 4E_c n̂² + ½E_l φ̂² from the truncated matrices.
    pub fn truncated_hamiltonian(&self) -> Mat<c64> {
        let n2 = &self.n * &self.n;
        let p2 = &self.phi * &self.phi;
        Mat::from_fn(self.dimension(), self.dimension(), |r, c| {
            n2[(r, c)] * (4.0 * self.e_c) + p2[(r, c)] * (0.5 * self.e_l)
        })
    }
}

pub fn mode_operators(e_c: f64, e_l: f64, dimension: usize) -> Result<ModeOperators> {
    ensure_finite("E_c", e_c)?;
    ensure_finite("E_l", e_l)?;
    if e_c <= 0.0 || e_l <= 0.0 {
        return Err(Error::InvalidParameter("mode energies must be positive".into()));
    }
    if dimension < 3 {
        return Err(Error::InvalidParameter(format!(
            "mode dimension must be at least 3, got {dimension}"
        )));
    }
    let phi_zpf = (2.0 * e_c / e_l).powf(0.25);
    let n_zpf = (e_l / (32.0 * e_c)).powf(0.25);
    let d = dimension;
    let phi = Mat::from_fn(d, d, |r, c| {
        if r + 1 == c {
            c64::new(phi_zpf * (c as f64).sqrt(), 0.0)
        } else if c + 1 == r {
            c64::new(phi_zpf * (r as f64).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    // n = i n_zpf (a† − a)
    let n = Mat::from_fn(d, d, |r, c| {
        if c + 1 == r {
            c64::new(0.0, n_zpf * (r as f64).sqrt())
        } else if r + 1 == c {
            c64::new(0.0, -n_zpf * (c as f64).sqrt())
        } else {
            c64::new(0.0, 0.0)
        }
    });
    Ok(ModeOperators { e_c, e_l, phi, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// f(k·op) by spectral decomposition of the self-adjoint `op`.
pub fn trig_of_position(op: &Mat<c64>, f: Trig, k: f64) -> Result<Mat<c64>> {
    if op.nrows() != op.ncols() {
        return Err(Error::InvalidParameter("operator must be square".into()));
    }
    let asymmetry = self_adjoint_defect(op);
    if asymmetry > SELF_ADJOINT_TOLERANCE {
        return Err(Error::NotSelfAdjoint { asymmetry });
    }
    let d = op.nrows();
    let evd = op
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenNoConvergence {
            dimension: d,
            detail: format!("{e:?}"),
        })?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let g: Vec<f64> = (0..d)
        .map(|i| match f {
            Trig::Cos => (k * s[i].re).cos(),
            Trig::Sin => (k * s[i].re).sin(),
        })
        .collect();
    let mut out = Mat::<c64>::zeros(d, d);
    for c in 0..d {
        for r in c..d {
            let mut acc = c64::new(0.0, 0.0);
            for (i, gi) in g.iter().enumerate() {
                acc += u[(r, i)] * u[(c, i)].conj() * *gi;
            }
            out[(r, c)] = acc;
            out[(c, r)] = acc.conj();
        }
        out[(c, c)] = c64::new(out[(c, c)].re, 0.0);
    }
    Ok(out)
}

/// max |A_rc| over the leading `block` × `block` block.
pub fn interior_max(a: &Mat<c64>, block: usize) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..block {
        for c in 0..block {
            worst = worst.max(a[(r, c)].norm());
        }
    }
    worst
}
