use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{converged_basis, cutoff_probes, device_levels, CUTOFF_TOLERANCE};
use crate::squid::SquidParams;

/// Records within this distance of a half-integer flux count as near half flux.
pub const NEAR_HALF_WINDOW: f64 = 0.015;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub flux_phi0: f64,
    pub i: usize,
    pub j: usize,
    pub ng: f64,
    /// GHz
    pub frequency: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetProvenance {
    Measured,
    Synthetic { seed: u64, sigma_mhz: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDataset {
    pub records: Vec<TransitionRecord>,
    pub provenance: DatasetProvenance,
}

/// Distance of a flux from the nearest half-integer, Φ₀.
pub fn distance_from_half(flux: f64) -> f64 {
    let x = flux - 0.5;
    (x - x.round()).abs()
}

impl TransitionDataset {
    pub fn new(records: Vec<TransitionRecord>, provenance: DatasetProvenance) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        }
        for (k, r) in records.iter().enumerate() {
            let bad = |what: &str| Err(Error::InvalidDataset(format!("record {k}: {what}")));
            if !r.flux_phi0.is_finite() {
                return bad("flux is not finite");
            }
            if !(r.frequency.is_finite() && r.frequency > 0.0) {
                return bad("frequency must be positive");
            }
            if !(r.weight.is_finite() && r.weight >= 0.0) {
                return bad("weight must be non-negative");
            }
            if r.j > 1 || r.i <= r.j {
                return bad("need source level j in {0, 1} and i > j");
            }
            if r.ng != 0.0 && r.ng != 0.5 {
                return bad("n_g branch must be 0 or 0.5");
            }
        }
        Ok(Self { records, provenance })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct flux values, ascending.
    pub fn fluxes(&self) -> Vec<f64> {
        let mut f: Vec<f64> = self.records.iter().map(|r| r.flux_phi0).collect();
        f.sort_by(f64::total_cmp);
        f.dedup();
        f
    }

    /// At least four distinct fluxes spanning both the near- and away-from-half-flux regions.
    pub fn check_identifiable(&self) -> Result<()> {
        let f = self.fluxes();
        if f.len() < 4 {
            return Err(Error::Unidentifiable(format!(
                "{} distinct flux points; at least 4 are needed for 4 parameters",
                f.len()
            )));
        }
        let near = f.iter().any(|&x| distance_from_half(x) <= NEAR_HALF_WINDOW);
        let away = f.iter().any(|&x| distance_from_half(x) > NEAR_HALF_WINDOW);
        if !(near && away) {
            return Err(Error::Unidentifiable(
                "data must cover both the near-half-flux and the away-from-half-flux regions".into(),
            ));
        }
        Ok(())
    }

    /// Record indices grouped by (flux, n_g) in canonical order.
    pub(crate) fn groups(&self) -> Vec<(f64, f64, Vec<usize>)> {
        let mut order: Vec<usize> = (0..self.records.len()).collect();
        let key = |k: &usize| {
            let r = &self.records[*k];
            (r.flux_phi0, r.ng, r.j, r.i, r.frequency, r.weight)
        };
        order.sort_by(|a, b| {
            let (x, y) = (key(a), key(b));
            x.0.total_cmp(&y.0)
                .then(x.1.total_cmp(&y.1))
                .then(x.2.cmp(&y.2))
                .then(x.3.cmp(&y.3))
                .then(x.4.total_cmp(&y.4))
                .then(x.5.total_cmp(&y.5))
        });
        let mut groups: Vec<(f64, f64, Vec<usize>)> = Vec::new();
        for k in order {
            let r = &self.records[k];
            match groups.last_mut() {
                Some((f, ng, idx)) if *f == r.flux_phi0 && *ng == r.ng => idx.push(k),
                _ => groups.push((r.flux_phi0, r.ng, vec![k])),
            }
        }
        groups
    }
}

/// Flux ranges and transitions to synthesize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    pub near: Vec<f64>,
    pub away: Vec<f64>,
    pub ngs: Vec<f64>,
    /// Highest level i of ω_{i0}.
    pub max_level: usize,
    /// Also emit ω_{i1} for 2 ≤ i ≤ max_level.
    pub include_j1: bool,
}

impl Default for SynthPlan {
    fn default() -> Self {
        Self {
            near: crate::spectrum::linspace(0.49, 0.51, 9),
            away: crate::spectrum::linspace(0.445, 0.475, 7),
            ngs: vec![0.0, 0.5],
            max_level: 3,
            include_j1: false,
        }
    }
}

/// Model transitions plus Gaussian noise of `sigma_ghz` drawn from a seeded ChaCha8 stream.
pub fn synthesize(params: &SquidParams, plan: &SynthPlan, sigma_ghz: f64, seed: u64) -> Result<TransitionDataset> {
    if !(sigma_ghz.is_finite() && sigma_ghz >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be non-negative, got {sigma_ghz}"
        )));
    }
    if plan.max_level < 1 || plan.ngs.is_empty() {
        return Err(Error::InvalidParameter(
            "synthesis plan needs max_level ≥ 1 and an n_g branch".into(),
        ));
    }
    let fluxes: Vec<f64> = plan.near.iter().chain(&plan.away).copied().collect();
    let levels = plan.max_level + 1;
    let basis = converged_basis(&cutoff_probes(params, &fluxes, &plan.ngs), levels, CUTOFF_TOLERANCE)?;
    let noise = Normal::new(0.0, sigma_ghz).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for &flux in &fluxes {
        for &ng in &plan.ngs {
            let lv = device_levels(&params.with_flux(flux).with_ng(ng), basis, levels).map_err(|e| e.at(flux, ng))?;
            let sources: &[usize] = if plan.include_j1 { &[0, 1] } else { &[0] };
            for &j in sources {
                for i in j + 1..levels {
                    let exact = lv[i] - lv[j];
                    let frequency = if sigma_ghz > 0.0 {
                        exact + noise.sample(&mut rng)
                    } else {
                        exact
                    };
                    records.push(TransitionRecord {
                        flux_phi0: flux,
                        i,
                        j,
                        ng,
                        frequency,
                        weight: 1.0,
                    });
                }
            }
        }
    }
    TransitionDataset::new(
        records,
        DatasetProvenance::Synthetic {
            seed,
            sigma_mhz: sigma_ghz * 1e3,
        },
    )
}
