//! Asymmetric SQUID parameterization with a shared second-harmonic ratio.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::potential::{HarmonicPotential, HarmonicTerm};
use crate::units;

/// Fit parameterization (E_C, E_J1 of the left arm, dE_J, α) plus bias point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidParams {
    /// GHz
    pub e_c: f64,
    /// GHz
    pub e_j1_left: f64,
    /// E_J1 of the right arm is `e_j1_left * (1 - d_ej)`.
    pub d_ej: f64,
    /// Ratio E_J2/E_J1 shared by both arms.
    pub alpha: f64,
    /// Offset charge in Cooper pairs.
    pub n_g: f64,
    /// Reduced external flux 2πΦ/Φ₀, radians.
    pub phi_ext: f64,
    /// When set to the arm inductive energy E_L (GHz), the right arm uses
    /// α − E_J1_L·dE_J/(4E_L) instead of α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_alpha_correction: Option<f64>,
}

impl SquidParams {
    pub fn new(e_c: f64, e_j1_left: f64, d_ej: f64, alpha: f64) -> Self {
        Self {
            e_c,
            e_j1_left,
            d_ej,
            alpha,
            n_g: 0.0,
            phi_ext: 0.0,
            right_alpha_correction: None,
        }
    }

    pub fn with_flux(mut self, flux_phi0: f64) -> Self {
        self.phi_ext = units::flux_to_phase(flux_phi0);
        self
    }

    pub fn with_phase(mut self, phi_ext: f64) -> Self {
        self.phi_ext = phi_ext;
        self
    }

    pub fn with_ng(mut self, n_g: f64) -> Self {
        self.n_g = n_g;
        self
    }

    pub fn flux(&self) -> f64 {
        units::phase_to_flux(self.phi_ext)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("E_C", self.e_c),
            ("E_J1_L", self.e_j1_left),
            ("dE_J", self.d_ej),
            ("alpha", self.alpha),
            ("n_g", self.n_g),
            ("phi_ext", self.phi_ext),
        ] {
            ensure_finite(name, v)?;
        }
        if self.e_c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "E_C must be positive, got {}",
                self.e_c
            )));
        }
        if self.e_j1_left < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "E_J1_L must be non-negative, got {}",
                self.e_j1_left
            )));
        }
        if self.d_ej.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "|dE_J| must be below 1, got {}",
                self.d_ej
            )));
        }
        if self.alpha.abs() >= 0.25 {
            return Err(Error::InvalidParameter(format!(
                "|alpha| must be below 0.25, got {}",
                self.alpha
            )));
        }
        if let Some(e_l) = self.right_alpha_correction {
            ensure_finite("E_L", e_l)?;
            if e_l <= 0.0 {
                return Err(Error::InvalidParameter("E_L must be positive".into()));
            }
        }
        Ok(())
    }

    /// Human-readable warnings about allowed but unusual values.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.alpha < 0.0 {
            notes.push(format!("negative second-harmonic ratio alpha = {}", self.alpha));
        }
        notes
    }

    pub fn e_j1_right(&self) -> f64 {
        self.e_j1_left * (1.0 - self.d_ej)
    }

    pub fn alpha_right(&self) -> f64 {
        match self.right_alpha_correction {
            Some(e_l) => self.alpha - self.e_j1_left * self.d_ej / (4.0 * e_l),
            None => self.alpha,
        }
    }

    /// E_J1^(L) + E_J1^(R).
    pub fn e_j_sigma(&self) -> f64 {
        self.e_j1_left + self.e_j1_right()
    }

    /// ΔE_J1 = E_J1^(L) − E_J1^(R).
    pub fn delta_e_j1(&self) -> f64 {
        self.e_j1_left - self.e_j1_right()
    }

    /// ΣE_J2 = α^(L)E_J1^(L) + α^(R)E_J1^(R).
    pub fn sum_e_j2(&self) -> f64 {
        self.alpha * self.e_j1_left + self.alpha_right() * self.e_j1_right()
    }

    /// Magnitude of the first harmonic at the current flux, |E_L + E_R e^{iφ}|.
    pub fn effective_e_j1(&self) -> f64 {
        let (l, r) = (self.e_j1_left, self.e_j1_right());
        (l * l + r * r + 2.0 * l * r * self.phi_ext.cos()).max(0.0).sqrt()
    }
}

/// Left arm at offset 0, right arm at offset φ_ext, second harmonics via α.
pub fn build_squid_potential(params: &SquidParams) -> Result<HarmonicPotential> {
    params.validate()?;
    let (l, r) = (params.e_j1_left, params.e_j1_right());
    let phi = params.phi_ext;
    HarmonicPotential::from_terms([
        HarmonicTerm::new(1, -l, 0.0),
        HarmonicTerm::new(1, -r, phi),
        HarmonicTerm::new(2, params.alpha * l, 0.0),
        HarmonicTerm::new(2, params.alpha_right() * r, phi),
    ])
}

/// dE_J for a junction asymmetry a = (E_L − E_R)/(E_L + E_R).
pub fn asymmetry_to_d_ej(asymmetry: f64) -> f64 {
    2.0 * asymmetry / (1.0 + asymmetry)
}

pub fn d_ej_to_asymmetry(d_ej: f64) -> f64 {
    d_ej / (2.0 - d_ej)
}

/// Ratio E_J2/E_J1 = β + E_J1/(4E_L) for an arm with inductance `l_ph`.
pub fn alpha_from_inductance(e_j1: f64, l_ph: f64, beta: f64) -> f64 {
    beta + e_j1 / (4.0 * units::inductive_energy(l_ph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_half_flux_cancels() {
        let p = SquidParams::new(0.1, 200.0, 0.0, 0.0).with_phase(PI);
        let u = build_squid_potential(&p).unwrap();
        for (a, b) in u.fourier() {
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
    }

    #[test]
    fn four_terms_at_generic_bias() {
        let p = SquidParams::new(0.1, 200.0, 0.01, 0.002).with_flux(0.3);
        let u = build_squid_potential(&p).unwrap();
        assert_eq!(u.terms().len(), 4);
        assert_eq!(u.terms()[1].offset, p.phi_ext);
    }

    #[test]
    fn half_flux_reduces_to_two_harmonics() {
        let p = SquidParams::new(0.1, 231.0, 0.0066, 0.0035).with_phase(PI);
        let u = build_squid_potential(&p).unwrap();
        let f = u.fourier();
        assert!((f[0].0 + p.delta_e_j1()).abs() < 1e-12);
        assert!((f[1].0 - p.sum_e_j2()).abs() < 1e-12);
        assert!(f[0].1.abs() < 1e-12 && f[1].1.abs() < 1e-12);
    }

    #[test]
    fn six_micron_device_derived_values() {
        let d_ej = asymmetry_to_d_ej(0.0033);
        assert!((d_ej - 0.006578).abs() < 1e-6);
        let alpha = alpha_from_inductance(231.0, 10.0, 0.0);
        assert!((alpha - 3.533e-3).abs() < 1e-6);
        let p = SquidParams::new(0.0956, 231.0, d_ej, alpha);
        assert!((p.delta_e_j1() - 1.52).abs() < 0.005);
        assert!((p.sum_e_j2() - 1.627).abs() < 0.002);
        assert!((d_ej_to_asymmetry(d_ej) - 0.0033).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(SquidParams::new(0.0, 1.0, 0.0, 0.0).validate().is_err());
        assert!(SquidParams::new(0.1, -1.0, 0.0, 0.0).validate().is_err());
        assert!(SquidParams::new(0.1, 1.0, 1.0, 0.0).validate().is_err());
        assert!(SquidParams::new(0.1, 1.0, 0.0, 0.3).validate().is_err());
        assert!(SquidParams::new(0.1, 1.0, 0.0, f64::NAN).validate().is_err());
        assert!(SquidParams::new(0.1, 0.0, 0.0, 0.0).validate().is_ok());
        let neg = SquidParams::new(0.1, 1.0, 0.0, -0.01);
        assert!(neg.validate().is_ok());
        assert_eq!(neg.notes().len(), 1);
    }

    #[test]
    fn right_alpha_correction() {
        let mut p = SquidParams::new(0.1, 200.0, 0.02, 0.003);
        assert_eq!(p.alpha_right(), 0.003);
        p.right_alpha_correction = Some(16346.0);
        assert!((p.alpha_right() - (0.003 - 200.0 * 0.02 / (4.0 * 16346.0))).abs() < 1e-15);
    }
}
