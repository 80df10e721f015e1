use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::TransitionDataset;
use super::simplex::{nelder_mead, SimplexOptions};
use crate::charge::{initial_cutoff, ChargeBasisSpec};
use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::spectrum::device_levels;
use crate::squid::SquidParams;

/// The four fitted circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    /// GHz
    pub e_c: f64,
    /// GHz
    pub e_j1_left: f64,
    pub d_ej: f64,
    pub alpha: f64,
}

pub const PARAMETER_NAMES: [&str; 4] = ["E_C", "E_J1_L", "dE_J", "alpha"];

impl FitParams {
    pub fn to_array(self) -> [f64; 4] {
        [self.e_c, self.e_j1_left, self.d_ej, self.alpha]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            e_c: a[0],
            e_j1_left: a[1],
            d_ej: a[2],
            alpha: a[3],
        }
    }

    pub fn squid(&self, right_alpha_correction: Option<f64>) -> SquidParams {
        let mut p = SquidParams::new(self.e_c, self.e_j1_left, self.d_ej, self.alpha);
        p.right_alpha_correction = right_alpha_correction;
        p
    }
}

impl From<&SquidParams> for FitParams {
    fn from(p: &SquidParams) -> Self {
        Self {
            e_c: p.e_c,
            e_j1_left: p.e_j1_left,
            d_ej: p.d_ej,
            alpha: p.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitBounds {
    pub lower: [f64; 4],
    pub upper: [f64; 4],
}

impl Default for FitBounds {
    fn default() -> Self {
        Self {
            lower: [0.01, 10.0, -0.2, -0.02],
            upper: [1.0, 500.0, 0.2, 0.05],
        }
    }
}

impl FitBounds {
    fn span(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    fn normalize(&self, x: [f64; 4]) -> [f64; 4] {
        std::array::from_fn(|k| (x[k] - self.lower[k]) / self.span(k))
    }

    fn denormalize(&self, u: &[f64]) -> [f64; 4] {
        std::array::from_fn(|k| self.lower[k] + u[k] * self.span(k))
    }

    pub fn contains(&self, x: [f64; 4]) -> bool {
        (0..4).all(|k| x[k] > self.lower[k] && x[k] < self.upper[k])
    }
}

/// Model evaluation against a dataset with records grouped by bias point.
pub(crate) struct CostModel<'a> {
    data: &'a TransitionDataset,
    groups: Vec<(f64, f64, Vec<usize>)>,
    correction: Option<f64>,
}

impl<'a> CostModel<'a> {
    pub(crate) fn new(data: &'a TransitionDataset, correction: Option<f64>) -> Self {
        Self {
            data,
            groups: data.groups(),
            correction,
        }
    }

    /// Predicted frequency per group, in canonical group order.
    fn predictions(&self, x: &FitParams) -> Result<Vec<Vec<f64>>> {
        let p = x.squid(self.correction);
        p.validate()?;
        let basis = ChargeBasisSpec::new(initial_cutoff(p.e_j_sigma(), p.e_c));
        let results = par_map(&self.groups, |(flux, ng, idx)| {
            let levels = idx.iter().map(|&k| self.data.records[k].i).max().unwrap_or(1) + 1;
            let lv = device_levels(&p.with_flux(*flux).with_ng(*ng), basis, levels).map_err(|e| e.at(*flux, *ng))?;
            Ok(idx
                .iter()
                .map(|&k| {
                    let r = &self.data.records[k];
                    lv[r.i] - lv[r.j]
                })
                .collect())
        });
        results.into_iter().collect()
    }

    pub(crate) fn cost(&self, x: &FitParams) -> Result<f64> {
        let pred = self.predictions(x)?;
        let mut total = 0.0;
        for ((_, _, idx), values) in self.groups.iter().zip(&pred) {
            for (&k, v) in idx.iter().zip(values) {
                let r = &self.data.records[k];
                total += r.weight * (v - r.frequency).powi(2);
            }
        }
        Ok(total)
    }

    /// √w·(model − data) in record order.
    pub(crate) fn residuals(&self, x: &FitParams) -> Result<Vec<f64>> {
        let pred = self.predictions(x)?;
        let mut out = vec![0.0; self.data.len()];
        for ((_, _, idx), values) in self.groups.iter().zip(&pred) {
            for (&k, v) in idx.iter().zip(values) {
                let r = &self.data.records[k];
                out[k] = r.weight.sqrt() * (v - r.frequency);
            }
        }
        Ok(out)
    }
}

/// Σ w (λ_i − λ_j − f)², GHz².
pub fn spectrum_cost(x: &FitParams, data: &TransitionDataset) -> Result<f64> {
    CostModel::new(data, None).cost(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub bounds: FitBounds,
    /// Total starts including the initial point.
    pub starts: usize,
    pub seed: u64,
    pub max_evaluations: usize,
    /// Half-width of the Latin-hypercube box around the initial point, as a
    /// fraction of each bound range.
    pub spread: f64,
    pub right_alpha_correction: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            bounds: FitBounds::default(),
            starts: 5,
            seed: 0,
            max_evaluations: 4000,
            spread: 0.05,
            right_alpha_correction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub evaluations: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// Best cost reached from each start.
    pub start_costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: FitParams,
    /// Cost at the optimum, GHz².
    pub residual_norm: f64,
    /// 1σ per parameter, ordered as `PARAMETER_NAMES`.
    pub uncertainties: [f64; 4],
    pub covariance: [[f64; 4]; 4],
    pub reduced_chi2: f64,
    /// √w·(model − data) per record, GHz.
    pub residuals: Vec<f64>,
    pub diagnostics: FitDiagnostics,
}

fn latin_hypercube(rng: &mut ChaCha8Rng, samples: usize) -> Vec<[f64; 4]> {
    let mut columns: Vec<Vec<f64>> = (0..4)
        .map(|_| {
            let mut c: Vec<f64> = (0..samples)
                .map(|s| (s as f64 + rng.random::<f64>()) / samples as f64)
                .collect();
            c.shuffle(rng);
            c
        })
        .collect();
    (0..samples)
        .map(|s| std::array::from_fn(|k| std::mem::take(&mut columns[k][s])))
        .collect()
}

/// Multi-start bounded simplex fit of (E_C, E_J1_L, dE_J, α).
pub fn fit_spectrum(data: &TransitionDataset, init: FitParams, options: &FitOptions) -> Result<FitResult> {
    data.check_identifiable()?;
    if data.len() <= 4 {
        return Err(Error::Unidentifiable(format!(
            "{} records for 4 parameters",
            data.len()
        )));
    }
    let bounds = options.bounds;
    if !bounds.contains(init.to_array()) {
        return Err(Error::InvalidParameter(format!(
            "initial point {init:?} is outside the fit bounds"
        )));
    }
    let model = CostModel::new(data, options.right_alpha_correction);
    let objective = |u: &[f64]| -> f64 {
        let clamped: Vec<f64> = u.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let excess: f64 = u.iter().zip(&clamped).map(|(a, b)| (a - b).powi(2)).sum();
        match model.cost(&FitParams::from_array(bounds.denormalize(&clamped))) {
            Ok(c) => c + 1e3 * excess * (1.0 + c),
            Err(_) => f64::INFINITY,
        }
    };

    let u0 = bounds.normalize(init.to_array());
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![u0];
    for s in latin_hypercube(&mut rng, options.starts.saturating_sub(1)) {
        starts.push(std::array::from_fn(|k| {
            (u0[k] + options.spread * (2.0 * s[k] - 1.0)).clamp(1e-6, 1.0 - 1e-6)
        }));
    }
    let simplex = SimplexOptions {
        max_evaluations: options.max_evaluations,
        x_tolerance: 1e-7,
        f_tolerance: 1e-11,
    };

    let mut diagnostics = FitDiagnostics {
        evaluations: 0,
        iterations: 0,
        restarts: 0,
        converged: false,
        start_costs: Vec::new(),
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let run = nelder_mead(objective, start, 0.02, simplex);
        diagnostics.evaluations += run.evaluations;
        diagnostics.iterations += run.iterations;
        diagnostics.converged |= run.converged;
        diagnostics.start_costs.push(run.value);
        if best.as_ref().is_none_or(|(_, v)| run.value < *v) {
            best = Some((run.x, run.value));
        }
    }
    if diagnostics.converged {
        // fresh simplex at the best point guards against a collapsed one
        let (x, value) = best.clone().expect("at least one start");
        let again = nelder_mead(objective, &x, 0.002, simplex);
        diagnostics.restarts += 1;
        diagnostics.evaluations += again.evaluations;
        diagnostics.iterations += again.iterations;
        if again.value < value {
            best = Some((again.x, again.value));
        }
    }
    if !diagnostics.converged {
        return Err(Error::NonConvergence {
            best_costs: diagnostics.start_costs,
            max_evaluations: options.max_evaluations,
        });
    }
    let (u_best, _) = best.expect("at least one start");
    let u_best: Vec<f64> = u_best.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let x = FitParams::from_array(bounds.denormalize(&u_best));
    let residual_norm = model.cost(&x)?;
    let residuals = model.residuals(&x)?;
    let dof = (data.len() - 4) as f64;
    let reduced_chi2 = residual_norm / dof;
    let covariance = gauss_newton_covariance(&model, &x, &bounds, reduced_chi2)?;
    let uncertainties = std::array::from_fn(|k| {
        let floor = 1e-15 * x.to_array()[k].abs().max(1e-3);
        covariance[k][k].max(0.0).sqrt().max(floor)
    });
    Ok(FitResult {
        params: x,
        residual_norm,
        uncertainties,
        covariance,
        reduced_chi2,
        residuals,
        diagnostics,
    })
}

/// s²(JᵀJ)⁻¹ with J from central differences of the weighted residuals.
fn gauss_newton_covariance(model: &CostModel, x: &FitParams, bounds: &FitBounds, s2: f64) -> Result<[[f64; 4]; 4]> {
    let base = x.to_array();
    let mut columns = Vec::with_capacity(4);
    for k in 0..4 {
        let h = 1e-6 * bounds.span(k);
        let mut plus = base;
        let mut minus = base;
        plus[k] += h;
        minus[k] -= h;
        let rp = model.residuals(&FitParams::from_array(plus))?;
        let rm = model.residuals(&FitParams::from_array(minus))?;
        columns.push(
            rp.iter()
                .zip(&rm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    let jtj = Mat::<f64>::from_fn(4, 4, |a, b| {
        columns[a].iter().zip(&columns[b]).map(|(x, y)| x * y).sum()
    });
    let llt = jtj
        .llt(Side::Lower)
        .map_err(|_| Error::Unidentifiable("normal matrix is singular; parameters are not constrained".into()))?;
    let inv = llt.inverse();
    Ok(std::array::from_fn(|a| std::array::from_fn(|b| s2 * inv[(a, b)])))
}

/// Best point of a `points`⁴ grid of cell centres inside the bounds.
pub fn coarse_initial_guess(data: &TransitionDataset, bounds: &FitBounds, points: usize) -> Result<FitParams> {
    if points == 0 {
        return Err(Error::InvalidParameter("grid needs at least one point per axis".into()));
    }
    let model = CostModel::new(data, None);
    let mut best: Option<(FitParams, f64)> = None;
    let axis = |k: usize, i: usize| bounds.lower[k] + bounds.span(k) * (i as f64 + 0.5) / points as f64;
    for a in 0..points {
        for b in 0..points {
            for c in 0..points {
                for d in 0..points {
                    let x = FitParams::from_array([axis(0, a), axis(1, b), axis(2, c), axis(3, d)]);
                    if let Ok(v) = model.cost(&x) {
                        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                            best = Some((x, v));
                        }
                    }
                }
            }
        }
    }
    best.map(|(x, _)| x)
        .ok_or_else(|| Error::Unidentifiable("cost could not be evaluated anywhere on the grid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::dataset::{synthesize, SynthPlan};

    #[test]
    fn lhs_strata() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = latin_hypercube(&mut rng, 4);
        for k in 0..4 {
            let mut bins: Vec<usize> = s.iter().map(|p| (p[k] * 4.0) as usize).collect();
            bins.sort();
            assert_eq!(bins, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn exact_data_has_zero_cost() {
        let p = SquidParams::new(0.138, 125.0, 0.0204, 0.0035);
        let plan = SynthPlan {
            near: vec![0.495, 0.5],
            away: vec![0.46],
            ..SynthPlan::default()
        };
        let d = synthesize(&p, &plan, 0.0, 1).unwrap();
        let x = FitParams::from(&p);
        assert!(spectrum_cost(&x, &d).unwrap() < 1e-12);
        let mut y = x;
        y.e_c *= 1.01;
        assert!(spectrum_cost(&y, &d).unwrap() > 1e-6);
    }
}
