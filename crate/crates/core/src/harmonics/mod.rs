//! Josephson harmonic content from intrinsic Andreev transport and from
//! series inductance, with truncated series and numeric oracles.
//!
//! Decompositions use U(φ) = −Σ E_Jn cos(nφ); the main-text second harmonic
//! is +E_J2 cos 2φ, i.e. the negative of coefficient 2 here.

mod andreev;
mod inductive;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use andreev::{
    andreev_exact, andreev_series, andreev_series_terms, andreev_term, TransparencyDistribution, PRINTED_SERIES_TERMS,
};
pub use inductive::{
    effective_decomposition, effective_second_harmonic, inductive_series, reduction_oracle, InductiveSeriesInput,
    FULL_SERIES_ORDER,
};

use crate::error::{Error, Result};
use crate::potential::{HarmonicPotential, HarmonicTerm};

/// Default number of uniform samples for numeric Fourier analysis.
pub const FOURIER_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AndreevSeries,
    AndreevOracle,
    InductiveSeries,
    ReductionOracle,
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicDecomposition {
    /// E_Jn in GHz for n = 1..=n_max, supplement sign convention.
    pub coefficients: Vec<f64>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Estimated absolute error of the coefficients where numerically obtained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

impl HarmonicDecomposition {
    pub fn new(coefficients: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidParameter(
                "a decomposition needs at least two harmonics".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("harmonic coefficients must be finite".into()));
        }
        Ok(Self {
            coefficients,
            provenance,
            warnings: Vec::new(),
            error_estimate: None,
        })
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len()
    }

    /// E_Jn (supplement convention); zero beyond n_max.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients.get(n.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    /// Second harmonic in the main-text convention, −E_J1 cos φ + E_J2 cos 2φ.
    pub fn main_text_second(&self) -> f64 {
        -self.coefficient(2)
    }

    /// Main-text ratio E_J2/E_J1.
    pub fn second_harmonic_ratio(&self) -> f64 {
        self.main_text_second() / self.coefficient(1)
    }

    pub fn to_potential(&self) -> HarmonicPotential {
        let mut p = HarmonicPotential::free_rotor();
        for (k, &c) in self.coefficients.iter().enumerate() {
            p.push(HarmonicTerm::new(k as u32 + 1, -c, 0.0))
                .expect("finite coefficients");
        }
        p
    }

    /// Inverse of [`to_potential`](Self::to_potential); the potential must be even in φ.
    pub fn from_potential(potential: &HarmonicPotential, provenance: Provenance) -> Result<Self> {
        let fourier = potential.fourier();
        let scale = potential.amplitude().max(f64::MIN_POSITIVE);
        if fourier.iter().any(|(_, b)| b.abs() > 1e-12 * scale) {
            return Err(Error::InvalidParameter(
                "potential has sine components and no cosine-series decomposition".into(),
            ));
        }
        let mut coefficients: Vec<f64> = fourier.iter().map(|(a, _)| -a).collect();
        coefficients.resize(coefficients.len().max(2), 0.0);
        Self::new(coefficients, provenance)
    }
}

/// Cosine coefficients E_Jn = −(2/M) Σ U(φ_j) cos(nφ_j) of samples on
/// φ_j = 2πj/M.
pub(crate) fn cosine_coefficients(samples: &[f64], n_max: usize) -> Vec<f64> {
    let m = samples.len() as f64;
    (1..=n_max)
        .map(|n| {
            let s: f64 = samples
                .iter()
                .enumerate()
                .map(|(j, u)| u * (2.0 * PI * (n * j) as f64 / m).cos())
                .sum();
            -2.0 * s / m
        })
        .collect()
}

pub(crate) fn grid_point(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}
