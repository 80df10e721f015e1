//! Harmonics generated by a linear inductance in series with a junction.

use super::{cosine_coefficients, grid_point, HarmonicDecomposition, Provenance, FOURIER_GRID};
use crate::error::{ensure_finite, Error, Result};

/// Highest power of x = E_J/E_L in the closed-form coefficients.
pub const FULL_SERIES_ORDER: u32 = 7;

/// (power of x, coefficient) for E_J1..E_J4 in units of E_J.
const SERIES: [&[(i32, f64)]; 4] = [
    &[(0, 1.0), (2, -1.0 / 8.0), (4, 1.0 / 192.0)],
    &[(1, -1.0 / 4.0), (3, 1.0 / 12.0), (5, -1.0 / 96.0)],
    &[(2, 1.0 / 8.0), (4, -9.0 / 128.0), (6, 1.0 / 64.0)],
    &[(3, -1.0 / 12.0), (5, 1.0 / 15.0), (7, -101.0 / 4608.0)],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductiveSeriesInput {
    /// GHz
    pub e_j: f64,
    /// GHz
    pub e_l: f64,
    /// Highest power of E_J/E_L kept.
    pub order: u32,
}

impl InductiveSeriesInput {
    pub fn new(e_j: f64, e_l: f64) -> Self {
        Self {
            e_j,
            e_l,
            order: FULL_SERIES_ORDER,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.e_j / self.e_l
    }

    fn validate(&self) -> Result<()> {
        ensure_finite("E_J", self.e_j)?;
        ensure_finite("E_L", self.e_l)?;
        if self.e_l <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "E_L must be positive, got {}",
                self.e_l
            )));
        }
        if self.e_j < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "E_J must be non-negative, got {}",
                self.e_j
            )));
        }
        if self.ratio() >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "E_J/E_L = {} is outside the series range (< 0.5)",
                self.ratio()
            )));
        }
        Ok(())
    }
}

/// Closed-form E_J1..E_J4 truncated at x^order.
pub fn inductive_series(input: InductiveSeriesInput) -> Result<HarmonicDecomposition> {
    input.validate()?;
    let x = input.ratio();
    let coefficients = SERIES
        .iter()
        .map(|terms| {
            input.e_j
                * terms
                    .iter()
                    .filter(|(p, _)| *p as u32 <= input.order)
                    .map(|(p, c)| c * x.powi(*p))
                    .sum::<f64>()
        })
        .collect();
    let mut d = HarmonicDecomposition::new(coefficients, Provenance::InductiveSeries)?;
    if x > 0.25 {
        d.warnings
            .push(format!("E_J/E_L = {x:.3} exceeds 0.25; series accuracy is degraded"));
    }
    Ok(d)
}

/// Stationary inductor phase for junction phase `phi` (unique when
/// E_J(1 + 4β) < E_L): root of −E_J sin u + 2βE_J sin 2u + E_L φ_L, u = φ − φ_L.
fn inductor_phase(phi: f64, e_j: f64, e_l: f64, beta: f64) -> f64 {
    let g = |pl: f64| {
        let u = phi - pl;
        -e_j * u.sin() + 2.0 * beta * e_j * (2.0 * u).sin() + e_l * pl
    };
    let dg = |pl: f64| {
        let u = phi - pl;
        e_j * u.cos() - 4.0 * beta * e_j * (2.0 * u).cos() + e_l
    };
    let bound = e_j * (1.0 + 2.0 * beta) / e_l;
    let (mut lo, mut hi) = (-bound, bound);
    let mut x = (e_j / e_l) * phi.sin();
    for _ in 0..100 {
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - gx / dg(x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// Potential of junction plus series inductor minimized over the inductor
/// phase on a uniform grid, then Fourier analyzed.
///
/// The junction itself is −E_J[cos u − β cos 2u].
pub fn reduction_oracle(e_j: f64, e_l: f64, beta: f64, n_max: usize) -> Result<HarmonicDecomposition> {
    ensure_finite("E_J", e_j)?;
    ensure_finite("E_L", e_l)?;
    ensure_finite("beta", beta)?;
    if e_l <= 0.0 {
        return Err(Error::InvalidParameter(format!("E_L must be positive, got {e_l}")));
    }
    if e_j < 0.0 || beta < 0.0 {
        return Err(Error::InvalidParameter("E_J and beta must be non-negative".into()));
    }
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be at least 2".into()));
    }
    if e_j * (1.0 + 4.0 * beta) >= e_l {
        return Err(Error::NonUniqueMinimizer { e_j, e_l, beta });
    }
    let m = FOURIER_GRID;
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let phi = grid_point(j, m);
            let pl = inductor_phase(phi, e_j, e_l, beta);
            let u = phi - pl;
            -e_j * (u.cos() - beta * (2.0 * u).cos()) + 0.5 * e_l * pl * pl
        })
        .collect();
    HarmonicDecomposition::new(cosine_coefficients(&samples, n_max), Provenance::ReductionOracle)
}

/// Main-text E_J2 = β·E_J1 + E_J1²/(4E_L).
pub fn effective_second_harmonic(e_j1: f64, e_l: f64, beta: f64) -> Result<f64> {
    ensure_finite("E_J1", e_j1)?;
    ensure_finite("E_L", e_l)?;
    ensure_finite("beta", beta)?;
    if e_l <= 0.0 {
        return Err(Error::InvalidParameter(format!("E_L must be positive, got {e_l}")));
    }
    Ok(beta * e_j1 + e_j1 * e_j1 / (4.0 * e_l))
}

/// Two-harmonic decomposition (E_J1, −E_J2,eff).
pub fn effective_decomposition(e_j1: f64, e_l: f64, beta: f64) -> Result<HarmonicDecomposition> {
    let e_j2 = effective_second_harmonic(e_j1, e_l, beta)?;
    HarmonicDecomposition::new(vec![e_j1, -e_j2], Provenance::Combined)
}
