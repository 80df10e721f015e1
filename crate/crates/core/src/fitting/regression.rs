use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::inductance;

/// One (E_J1, E_J2/E_J1) observation with 1σ errors on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub x: f64,
    pub y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_sigma: f64,
    pub intercept_sigma: f64,
    pub covariance: [[f64; 2]; 2],
    /// Weighted orthogonal distance sum divided by n − 2.
    pub reduced_chi2: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 500;

fn check_points(points: &[RatioPoint]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} points; at least 3 are required",
            points.len()
        )));
    }
    for (k, p) in points.iter().enumerate() {
        if ![p.x, p.y, p.sigma_x, p.sigma_y].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidDataset(format!("point {k} is not finite")));
        }
        if p.sigma_x <= 0.0 || p.sigma_y <= 0.0 {
            return Err(Error::InvalidDataset(format!(
                "point {k}: uncertainties must be positive"
            )));
        }
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!("only {} distinct x values", xs.len())));
    }
    Ok(())
}

fn ordinary_slope(points: &[RatioPoint]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.x - mx) * (p.y - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.x - mx).powi(2)).sum();
    sxy / sxx
}

/// S(m, b) = Σ (y − m x − b)² / (σ_y² + m² σ_x²).
pub(crate) fn orthogonal_cost(points: &[RatioPoint], m: f64, b: f64) -> f64 {
    points
        .iter()
        .map(|p| (p.y - m * p.x - b).powi(2) / (p.sigma_y.powi(2) + m * m * p.sigma_x.powi(2)))
        .sum()
}

fn cost_hessian(points: &[RatioPoint], m: f64, b: f64) -> [[f64; 2]; 2] {
    let mut h = [[0.0; 2]; 2];
    for p in points {
        let sx2 = p.sigma_x.powi(2);
        let d = p.sigma_y.powi(2) + m * m * sx2;
        let r = p.y - m * p.x - b;
        h[0][0] += 2.0 * p.x * p.x / d + 8.0 * r * p.x * m * sx2 / (d * d) - 2.0 * r * r * sx2 / (d * d)
            + 8.0 * r * r * m * m * sx2 * sx2 / (d * d * d);
        h[0][1] += 2.0 * p.x / d + 4.0 * r * m * sx2 / (d * d);
        h[1][1] += 2.0 / d;
    }
    h[1][0] = h[0][1];
    h
}

/// Errors-in-variables straight line by York iteration.
pub fn deming_fit(points: &[RatioPoint]) -> Result<LineFitResult> {
    check_points(points)?;
    let mut m = ordinary_slope(points);
    if !m.is_finite() {
        return Err(Error::Degenerate("x values have no spread".into()));
    }
    let mut iterations = 0;
    let mut b;
    loop {
        iterations += 1;
        let w: Vec<f64> = points
            .iter()
            .map(|p| 1.0 / (p.sigma_y.powi(2) + m * m * p.sigma_x.powi(2)))
            .collect();
        let sw: f64 = w.iter().sum();
        let xbar = points.iter().zip(&w).map(|(p, w)| w * p.x).sum::<f64>() / sw;
        let ybar = points.iter().zip(&w).map(|(p, w)| w * p.y).sum::<f64>() / sw;
        let (mut num, mut den) = (0.0, 0.0);
        for (p, w) in points.iter().zip(&w) {
            let (u, v) = (p.x - xbar, p.y - ybar);
            let beta = w * (u * p.sigma_y.powi(2) + m * v * p.sigma_x.powi(2));
            num += w * beta * v;
            den += w * beta * u;
        }
        let next = num / den;
        if !next.is_finite() {
            return Err(Error::Degenerate("orthogonal regression has no unique slope".into()));
        }
        let done = (next - m).abs() <= 1e-15 * next.abs().max(f64::MIN_POSITIVE);
        m = next;
        b = ybar - m * xbar;
        if done || iterations >= MAX_ITERATIONS {
            break;
        }
    }
    if iterations >= MAX_ITERATIONS {
        return Err(Error::NonConvergence {
            best_costs: vec![orthogonal_cost(points, m, b)],
            max_evaluations: MAX_ITERATIONS,
        });
    }
    let s = orthogonal_cost(points, m, b);
    let reduced_chi2 = s / (points.len() - 2) as f64;
    let h = cost_hessian(points, m, b);
    let hm = Mat::<f64>::from_fn(2, 2, |i, j| h[i][j]);
    let inv = hm
        .llt(Side::Lower)
        .map_err(|_| Error::Degenerate("distance Hessian is not positive definite".into()))?
        .inverse();
    let covariance: [[f64; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| 2.0 * reduced_chi2 * inv[(i, j)]));
    Ok(LineFitResult {
        slope: m,
        intercept: b,
        slope_sigma: covariance[0][0].max(0.0).sqrt(),
        intercept_sigma: covariance[1][1].max(0.0).sqrt(),
        covariance,
        reduced_chi2,
        iterations,
    })
}

/// Closed-form Deming slope and intercept for a uniform error-variance ratio
/// `delta = σ_y²/σ_x²`.
pub fn deming_closed_form(points: &[(f64, f64)], delta: f64) -> Result<(f64, f64)> {
    if points.len() < 3 || delta.is_nan() || delta <= 0.0 {
        return Err(Error::Degenerate(
            "need at least 3 points and a positive variance ratio".into(),
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxy == 0.0 {
        return Err(Error::Degenerate("x and y are uncorrelated".into()));
    }
    let a = syy - delta * sxx;
    let m = (a + (a * a + 4.0 * delta * sxy * sxy).sqrt()) / (2.0 * sxy);
    Ok((m, my - m * mx))
}

/// Devices whose junction asymmetry exceeds this (percent) are left out of the
/// ratio regression by default.
pub const DEFAULT_MAX_ASYMMETRY_PERCENT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InductanceEstimate {
    /// None when the slope is not positive.
    pub inductance_ph: Option<f64>,
    pub inductance_sigma_ph: Option<f64>,
    pub e_l_ghz: Option<f64>,
    pub beta: f64,
    pub beta_sigma: f64,
    pub physical: bool,
}

/// Slope 1/(4E_L) and intercept β of the ratio line.
pub fn inductance_and_beta(fit: &LineFitResult) -> InductanceEstimate {
    let physical = fit.slope > 0.0 && fit.slope.is_finite();
    let (l, sl, el) = if physical {
        let e_l = 1.0 / (4.0 * fit.slope);
        let l = inductance(e_l);
        (Some(l), Some(l * fit.slope_sigma / fit.slope), Some(e_l))
    } else {
        (None, None, None)
    };
    InductanceEstimate {
        inductance_ph: l,
        inductance_sigma_ph: sl,
        e_l_ghz: el,
        beta: fit.intercept,
        beta_sigma: fit.intercept_sigma,
        physical,
    }
}
