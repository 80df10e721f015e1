//! Short-junction Andreev potential U(φ) = −Δ Σ sqrt(1 − T sin²(φ/2)).

use std::fmt;
use std::sync::Arc;

use super::{cosine_coefficients, grid_point, HarmonicDecomposition, Provenance, FOURIER_GRID};
use crate::error::{ensure_finite, Error, Result};

/// Number of transparency powers kept per harmonic in the closed-form series.
pub const PRINTED_SERIES_TERMS: usize = 3;

const QUADRATURE_TOLERANCE: f64 = 1e-12;
const ORACLE_RELATIVE_TOLERANCE: f64 = 1e-10;
const MAX_ORACLE_GRID: usize = 1 << 20;

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Transparencies {
    Channels(Vec<f64>),
    Density { channels: f64, density: Density },
}

/// Transparencies of the conduction channels of one junction, either as a
/// discrete list or as a normalized density with a channel count.
#[derive(Clone)]
pub struct TransparencyDistribution {
    /// Superconducting gap Δ, GHz.
    pub gap: f64,
    transparencies: Transparencies,
}

impl fmt::Debug for TransparencyDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.transparencies {
            Transparencies::Channels(t) => f
                .debug_struct("TransparencyDistribution")
                .field("gap", &self.gap)
                .field("channels", t)
                .finish(),
            Transparencies::Density { channels, .. } => f
                .debug_struct("TransparencyDistribution")
                .field("gap", &self.gap)
                .field("density_channels", channels)
                .finish(),
        }
    }
}

fn check_gap(gap: f64) -> Result<()> {
    ensure_finite("gap", gap)?;
    if gap <= 0.0 {
        return Err(Error::InvalidParameter(format!("gap must be positive, got {gap}")));
    }
    Ok(())
}

fn integrate<F: Fn(f64) -> f64>(f: F, tolerance: f64) -> Result<f64> {
    let out = quadrature::integrate(f, 0.0, 1.0, tolerance);
    if !out.integral.is_finite() || out.error_estimate > tolerance.max(1e-15) * 10.0 {
        return Err(Error::Quadrature {
            estimate: out.error_estimate,
            tolerance,
            evaluations: u64::from(out.num_function_evaluations),
        });
    }
    Ok(out.integral)
}

impl TransparencyDistribution {
    pub fn channels(gap: f64, transparencies: Vec<f64>) -> Result<Self> {
        check_gap(gap)?;
        if transparencies.is_empty() {
            return Err(Error::InvalidParameter("at least one channel is required".into()));
        }
        if let Some(t) = transparencies.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::InvalidParameter(format!("transparency {t} outside (0, 1]")));
        }
        Ok(Self {
            gap,
            transparencies: Transparencies::Channels(transparencies),
        })
    }

    pub fn single(gap: f64, transparency: f64) -> Result<Self> {
        Self::channels(gap, vec![transparency])
    }

    /// `channels` identical channels of transparency `t0`.
    pub fn uniform(gap: f64, channels: usize, t0: f64) -> Result<Self> {
        Self::channels(gap, vec![t0; channels])
    }

    /// Density ρ(T) on (0, 1], which must be non-negative and normalized.
    pub fn density<F>(gap: f64, channels: f64, density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_gap(gap)?;
        ensure_finite("channel count", channels)?;
        if channels < 1.0 {
            return Err(Error::InvalidParameter("channel count must be at least 1".into()));
        }
        for k in 1..=1000 {
            let t = k as f64 / 1000.0;
            let v = density(t);
            if v.is_nan() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("density is {v} at T = {t}")));
            }
        }
        let norm = integrate(&density, QUADRATURE_TOLERANCE)?;
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!("density integrates to {norm}, not 1")));
        }
        Ok(Self {
            gap,
            transparencies: Transparencies::Density {
                channels,
                density: Arc::new(density),
            },
        })
    }

    pub fn channel_count(&self) -> f64 {
        match &self.transparencies {
            Transparencies::Channels(t) => t.len() as f64,
            Transparencies::Density { channels, .. } => *channels,
        }
    }

    /// Σ T^k over channels, or N·∫ρ(T)T^k dT.
    pub fn moment(&self, k: u32) -> Result<f64> {
        match &self.transparencies {
            Transparencies::Channels(t) => Ok(t.iter().map(|x| x.powi(k as i32)).sum()),
            Transparencies::Density { channels, density } => {
                let m = integrate(|t| density(t) * t.powi(k as i32), QUADRATURE_TOLERANCE)?;
                Ok(channels * m)
            }
        }
    }

    /// U(φ) in GHz.
    pub fn potential(&self, phi: f64) -> Result<f64> {
        let s = (0.5 * phi).sin().powi(2);
        let sum = match &self.transparencies {
            Transparencies::Channels(t) => t.iter().map(|x| (1.0 - x * s).max(0.0).sqrt()).sum(),
            Transparencies::Density { channels, density } => {
                let tol = QUADRATURE_TOLERANCE;
                channels * integrate(|t| density(t) * (1.0 - t * s).max(0.0).sqrt(), tol)?
            }
        };
        Ok(-self.gap * sum)
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient of Δ·T^k in E_Jn: the T^k term of sqrt(1 − T s) projected on cos nφ.
pub fn andreev_term(n: u32, k: u32) -> f64 {
    if k < n {
        return 0.0;
    }
    // binom(1/2, k)(−1)^k
    let mut c = 1.0;
    for j in 1..=k {
        c *= (f64::from(j) - 1.5) / f64::from(j);
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    c * 2f64.powi(1 - 2 * k as i32) * sign * binomial(u64::from(2 * k), u64::from(k - n))
}

/// Closed-form series keeping `terms` powers of T per harmonic.
pub fn andreev_series_terms(
    dist: &TransparencyDistribution,
    n_max: usize,
    terms: usize,
) -> Result<HarmonicDecomposition> {
    if n_max < 2 || terms == 0 {
        return Err(Error::InvalidParameter("need n_max >= 2 and at least one term".into()));
    }
    let mut coefficients = Vec::with_capacity(n_max);
    for n in 1..=n_max as u32 {
        let mut sum = 0.0;
        for k in n..n + terms as u32 {
            sum += andreev_term(n, k) * dist.moment(k)?;
        }
        coefficients.push(dist.gap * sum);
    }
    HarmonicDecomposition::new(coefficients, Provenance::AndreevSeries)
}

/// Tunnel-limit series with three powers of T per harmonic, n_max ≤ 3.
pub fn andreev_series(dist: &TransparencyDistribution, n_max: usize) -> Result<HarmonicDecomposition> {
    if !(2..=3).contains(&n_max) {
        return Err(Error::InvalidParameter(format!(
            "the closed-form series covers n_max in 2..=3, got {n_max}"
        )));
    }
    andreev_series_terms(dist, n_max, PRINTED_SERIES_TERMS)
}

fn andreev_grid(dist: &TransparencyDistribution, n_max: usize, m: usize) -> Result<Vec<f64>> {
    let samples = (0..m)
        .map(|j| dist.potential(grid_point(j, m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(cosine_coefficients(&samples, n_max))
}

/// Harmonics from numerical Fourier analysis of the exact potential. The grid
/// is doubled until successive estimates agree to 1e−10 relative to E_J1.
pub fn andreev_exact(dist: &TransparencyDistribution, n_max: usize) -> Result<HarmonicDecomposition> {
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be at least 2".into()));
    }
    let mut m = FOURIER_GRID;
    let mut coarse = andreev_grid(dist, n_max, m / 2)?;
    loop {
        let fine = andreev_grid(dist, n_max, m)?;
        let scale = fine[0].abs().max(f64::MIN_POSITIVE);
        let diff = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if diff <= ORACLE_RELATIVE_TOLERANCE * scale || fine.iter().all(|c| *c == 0.0) {
            let mut d = HarmonicDecomposition::new(fine, Provenance::AndreevOracle)?;
            d.error_estimate = Some(diff);
            return Ok(d);
        }
        if m >= MAX_ORACLE_GRID {
            return Err(Error::Quadrature {
                estimate: diff / scale,
                tolerance: ORACLE_RELATIVE_TOLERANCE,
                evaluations: m as u64,
            });
        }
        coarse = fine;
        m *= 2;
    }
}
