//! Signed cosine series U(φ) = Σ cₙ cos(n(φ − δₙ)).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub order: u32,
    /// GHz
    pub coefficient: f64,
    /// radians
    pub offset: f64,
}

impl HarmonicTerm {
    pub fn new(order: u32, coefficient: f64, offset: f64) -> Self {
        Self {
            order,
            coefficient,
            offset,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidParameter("harmonic order must be at least 1".into()));
        }
        ensure_finite("harmonic coefficient", self.coefficient)?;
        ensure_finite("harmonic offset", self.offset)
    }

    fn same_slot(&self, other: &HarmonicTerm) -> bool {
        if self.order != other.order {
            return false;
        }
        let d = f64::from(self.order) * (self.offset - other.offset);
        wrap_angle(d).abs() < 1e-12
    }

    fn argument(&self, phi: f64) -> f64 {
        f64::from(self.order) * (phi - self.offset)
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// An empty potential is the free rotor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicPotential {
    terms: Vec<HarmonicTerm>,
}

impl HarmonicPotential {
    pub fn free_rotor() -> Self {
        Self::default()
    }

    /// Builds a potential keeping the terms as given; terms sharing an
    /// (order, offset) slot are summed.
    pub fn from_terms<I: IntoIterator<Item = HarmonicTerm>>(terms: I) -> Result<Self> {
        let mut p = Self::default();
        for t in terms {
            p.push(t)?;
        }
        Ok(p)
    }

    /// Builds U = Σ aₙ cos nφ + bₙ sin nφ from (aₙ, bₙ) pairs, index 0 ↔ n = 1.
    pub fn from_fourier(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut p = Self::default();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if let Some(t) = canonical_term(k as u32 + 1, a, b) {
                p.push(t)?;
            }
        }
        Ok(p)
    }

    pub fn push(&mut self, term: HarmonicTerm) -> Result<()> {
        term.validate()?;
        if let Some(existing) = self.terms.iter_mut().find(|t| t.same_slot(&term)) {
            existing.coefficient += term.coefficient;
        } else {
            self.terms.push(term);
        }
        Ok(())
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }

    /// Fourier pairs (aₙ, bₙ) with U = Σ aₙ cos nφ + bₙ sin nφ, index 0 ↔ n = 1.
    pub fn fourier(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); self.max_order() as usize];
        for t in &self.terms {
            let n = f64::from(t.order);
            let slot = &mut out[t.order as usize - 1];
            slot.0 += t.coefficient * (n * t.offset).cos();
            slot.1 += t.coefficient * (n * t.offset).sin();
        }
        out
    }

    /// One term per order, equal-order terms combined trigonometrically.
    pub fn canonical(&self) -> Self {
        let terms = self
            .fourier()
            .into_iter()
            .enumerate()
            .filter_map(|(k, (a, b))| canonical_term(k as u32 + 1, a, b))
            .collect();
        Self { terms }
    }

    pub fn merge(&self, other: &HarmonicPotential) -> Self {
        let mut all = self.clone();
        all.terms.extend_from_slice(&other.terms);
        all.canonical()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| HarmonicTerm::new(t.order, t.coefficient * factor, t.offset))
            .collect();
        Self { terms }
    }

    /// U(φ − shift).
    pub fn shifted(&self, shift: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| HarmonicTerm::new(t.order, t.coefficient, t.offset + shift))
            .collect();
        Self { terms }
    }

    /// U(−φ).
    pub fn mirrored(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| HarmonicTerm::new(t.order, t.coefficient, -t.offset))
            .collect();
        Self { terms }
    }

    pub fn value(&self, phi: f64) -> f64 {
        self.terms.iter().map(|t| t.coefficient * t.argument(phi).cos()).sum()
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| -t.coefficient * f64::from(t.order) * t.argument(phi).sin())
            .sum()
    }

    pub fn second_derivative(&self, phi: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let n = f64::from(t.order);
                -t.coefficient * n * n * t.argument(phi).cos()
            })
            .sum()
    }

    pub fn third_derivative(&self, phi: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let n = f64::from(t.order);
                t.coefficient * n * n * n * t.argument(phi).sin()
            })
            .sum()
    }

    /// Largest Fourier amplitude, GHz.
    pub fn amplitude(&self) -> f64 {
        self.fourier().into_iter().map(|(a, b)| a.hypot(b)).fold(0.0, f64::max)
    }

    /// Positions of strict local minima on a uniform grid of `points` samples.
    pub fn local_minima(&self, points: usize) -> Vec<f64> {
        let step = 2.0 * PI / points as f64;
        let u: Vec<f64> = (0..points).map(|k| self.value(-PI + k as f64 * step)).collect();
        let scale = self.amplitude().max(f64::MIN_POSITIVE);
        (0..points)
            .filter(|&k| {
                let prev = u[(k + points - 1) % points];
                let next = u[(k + 1) % points];
                u[k] < prev - 1e-14 * scale && u[k] <= next
            })
            .map(|k| -PI + k as f64 * step)
            .collect()
    }
}

fn canonical_term(order: u32, a: f64, b: f64) -> Option<HarmonicTerm> {
    let r = a.hypot(b);
    if r == 0.0 {
        return None;
    }
    if b.abs() <= 1e-15 * r {
        return Some(HarmonicTerm::new(order, a, 0.0));
    }
    let offset = b.atan2(a) / f64::from(order);
    Some(HarmonicTerm::new(order, r, offset))
}
