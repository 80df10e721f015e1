use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::potential::HarmonicPotential;
use crate::squid::{build_squid_potential, SquidParams};
use crate::units;

/// Minimum number of samples over one period for supercurrent grids.
pub const MIN_GRID: usize = 1024;
/// Coarse grid used to bracket supercurrent extrema.
pub const EXTREMUM_GRID: usize = 4096;

/// I(φ) = (2π/Φ₀) dU/dφ in µA on the given phase grid.
pub fn supercurrent(potential: &HarmonicPotential, phis: &[f64]) -> Result<Vec<f64>> {
    if phis.len() < MIN_GRID {
        return Err(Error::InvalidParameter(format!(
            "phase grid has {} points, at least {MIN_GRID} are required",
            phis.len()
        )));
    }
    let k = units::current_per_ghz();
    Ok(phis.iter().map(|&phi| k * potential.derivative(phi)).collect())
}

/// Uniform grid of `points` samples on [0, 2π).
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points).map(|j| 2.0 * PI * j as f64 / points as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentExtrema {
    /// µA
    pub i_max: f64,
    /// µA
    pub i_min: f64,
    pub phi_at_max: f64,
    pub phi_at_min: f64,
}

impl CurrentExtrema {
    /// (|I_max| − |I_min|)/(|I_max| + |I_min|).
    pub fn eta(&self) -> f64 {
        let (a, b) = (self.i_max.abs(), self.i_min.abs());
        (a - b) / (a + b)
    }
}

/// Refines a grid extremum of U' with a parabola through the neighbours, then
/// Newton steps on U'' = 0 kept inside the bracketing cell.
fn polish(u: &HarmonicPotential, samples: &[f64], k: usize, step: f64) -> f64 {
    let m = samples.len();
    let (a, b, c) = (samples[(k + m - 1) % m], samples[k], samples[(k + 1) % m]);
    let curvature = a - 2.0 * b + c;
    let phi0 = k as f64 * step;
    let mut phi = if curvature != 0.0 {
        phi0 + 0.5 * step * (a - c) / curvature
    } else {
        phi0
    };
    for _ in 0..20 {
        let d2 = u.third_derivative(phi);
        if d2 == 0.0 {
            break;
        }
        let next = phi - u.second_derivative(phi) / d2;
        if !next.is_finite() || (next - phi0).abs() > step {
            break;
        }
        let done = (next - phi).abs() < 1e-15 * (1.0 + phi.abs());
        phi = next;
        if done {
            break;
        }
    }
    phi
}

pub fn current_extrema(potential: &HarmonicPotential) -> Result<CurrentExtrema> {
    let k = units::current_per_ghz();
    let scale = potential.amplitude();
    if scale == 0.0 {
        return Err(Error::FlatPotential);
    }
    let m = EXTREMUM_GRID;
    let step = 2.0 * PI / m as f64;
    let samples: Vec<f64> = (0..m).map(|j| potential.derivative(j as f64 * step)).collect();
    let (mut kmax, mut kmin) = (0, 0);
    for (j, s) in samples.iter().enumerate() {
        if *s > samples[kmax] {
            kmax = j;
        }
        if *s < samples[kmin] {
            kmin = j;
        }
    }
    if samples[kmax] - samples[kmin] <= 1e-14 * scale {
        return Err(Error::FlatPotential);
    }
    let phi_max = polish(potential, &samples, kmax, step);
    let phi_min = polish(potential, &samples, kmin, step);
    let i_max = (k * potential.derivative(phi_max)).max(k * samples[kmax]);
    let i_min = (k * potential.derivative(phi_min)).min(k * samples[kmin]);
    Ok(CurrentExtrema {
        i_max,
        i_min,
        phi_at_max: phi_max.rem_euclid(2.0 * PI),
        phi_at_min: phi_min.rem_euclid(2.0 * PI),
    })
}

/// Diode rectification efficiency of a current-phase relation.
pub fn rectification_efficiency(potential: &HarmonicPotential) -> Result<f64> {
    Ok(current_extrema(potential)?.eta())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiodePoint {
    pub flux_phi0: f64,
    /// µA
    pub i_max: f64,
    /// µA
    pub i_min: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiodeReport {
    pub grid_points: usize,
    pub points: Vec<DiodePoint>,
}

impl DiodeReport {
    pub fn max_eta(&self) -> f64 {
        self.points.iter().map(|p| p.eta).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Extremal supercurrents of the SQUID potential across a flux grid.
pub fn diode_scan(params: &SquidParams, fluxes: &[f64]) -> Result<DiodeReport> {
    params.validate()?;
    let results = par_map(fluxes, |&flux| {
        let u = build_squid_potential(&params.with_flux(flux))?;
        let e = current_extrema(&u).map_err(|e| e.at(flux, params.n_g))?;
        Ok(DiodePoint {
            flux_phi0: flux,
            i_max: e.i_max,
            i_min: e.i_min,
            eta: e.eta(),
        })
    });
    Ok(DiodeReport {
        grid_points: EXTREMUM_GRID,
        points: results.into_iter().collect::<Result<_>>()?,
    })
}
