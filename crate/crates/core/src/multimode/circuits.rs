use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::mode::{mode_operators, trig_of_position, Trig};
use super::{Factor, TensorLayout};
use crate::charge::ChargeBasisSpec;
use crate::devices::Device;
use crate::error::{ensure_finite, Error, Result};
use crate::linalg::eigenvalues;
use crate::potential::{HarmonicPotential, HarmonicTerm};
use crate::spectrum::{smallest_cutoff, SingleModeProblem};
use crate::squid::SquidParams;
use crate::units;

/// Default cap on the product dimension of a multimode Hamiltonian.
pub const DEFAULT_DIMENSION_CAP: usize = 200_000;
const CUTOFF_TOLERANCE: f64 = 1e-6;

/// cos φ̂ in the charge basis, e^{iφ̂}|n⟩ = |n+1⟩.
pub fn charge_cos(basis: ChargeBasisSpec) -> Mat<c64> {
    let d = basis.dimension();
    Mat::from_fn(d, d, |r, c| {
        if r.abs_diff(c) == 1 {
            c64::new(0.5, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// sin φ̂ in the charge basis.
pub fn charge_sin(basis: ChargeBasisSpec) -> Mat<c64> {
    let d = basis.dimension();
    Mat::from_fn(d, d, |r, c| {
        if r == c + 1 {
            c64::new(0.0, -0.5)
        } else if c == r + 1 {
            c64::new(0.0, 0.5)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

fn offset_charges(basis: ChargeBasisSpec, n_g: f64) -> Vec<f64> {
    (0..basis.dimension()).map(|m| basis.charge(m) - n_g).collect()
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure_finite(name, v)?;
    if v <= 0.0 {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Capacitively shunted SQUID with a series inductance in each arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullSquidCircuit {
    pub c_j_left_ff: f64,
    pub c_j_right_ff: f64,
    pub c_sh_ff: f64,
    /// Per arm, pH.
    pub inductance_ph: f64,
    /// GHz
    pub e_j_left: f64,
    /// GHz
    pub e_j_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullSquidDims {
    pub theta: usize,
    pub phi: usize,
    pub charge_cutoff: usize,
    /// Storage order of the (θ, φ, ϕ) factors, outermost first.
    pub order: [usize; 3],
    pub cap: usize,
}

impl FullSquidDims {
    pub fn new(charge_cutoff: usize) -> Self {
        Self {
            theta: 6,
            phi: 10,
            charge_cutoff,
            order: [0, 1, 2],
            cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn dimension(&self) -> usize {
        self.theta * self.phi * (2 * self.charge_cutoff + 1)
    }
}

impl FullSquidCircuit {
    /// Circuit for a table entry with equal bare junction energies split per
    /// the measured asymmetry and no intrinsic second harmonic.
    pub fn from_device(device: &Device, inductance_ph: f64) -> Self {
        let (l, r) = device.junction_capacitances();
        Self {
            c_j_left_ff: l,
            c_j_right_ff: r,
            c_sh_ff: crate::devices::SHUNT_CAPACITANCE_FF,
            inductance_ph,
            e_j_left: device.e_j1_left,
            e_j_right: device.e_j1_right(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("C_J^L", self.c_j_left_ff)?;
        positive("C_J^R", self.c_j_right_ff)?;
        positive("C_sh", self.c_sh_ff)?;
        positive("L", self.inductance_ph)?;
        for (name, v) in [("E_J^L", self.e_j_left), ("E_J^R", self.e_j_right)] {
            ensure_finite(name, v)?;
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        let rel = (self.c_j_left_ff - self.c_j_right_ff).abs() / self.c_j();
        if rel >= 0.05 {
            return Err(Error::InvalidParameter(format!(
                "junction capacitances differ by {:.1}%; the model assumes them equal",
                100.0 * rel
            )));
        }
        Ok(())
    }

    /// Mean junction capacitance, fF.
    pub fn c_j(&self) -> f64 {
        0.5 * (self.c_j_left_ff + self.c_j_right_ff)
    }

    pub fn e_c_theta(&self) -> f64 {
        units::charging_constant() * (1.0 / self.c_sh_ff + 0.5 / self.c_j())
    }

    pub fn e_c_phi(&self) -> f64 {
        2.0 * units::charging_constant() / self.c_j()
    }

    pub fn e_c_varphi(&self) -> f64 {
        0.5 * units::charging_constant() / self.c_j()
    }

    pub fn coupling(&self) -> f64 {
        4.0 * units::charging_constant() / self.c_j()
    }

    pub fn e_l(&self) -> f64 {
        units::inductive_energy(self.inductance_ph)
    }

    /// Single-mode charging energy e²/2(C_sh + C_J^L + C_J^R).
    pub fn effective_e_c(&self) -> f64 {
        units::charging_energy(self.c_sh_ff + self.c_j_left_ff + self.c_j_right_ff)
    }

    /// Second-harmonic model with per-arm E_J²/(4E_L) corrections.
    pub fn approximate_params(&self, phi_ext: f64, n_g: f64) -> Result<SquidParams> {
        self.validate()?;
        let d_ej = if self.e_j_left > 0.0 {
            1.0 - self.e_j_right / self.e_j_left
        } else if self.e_j_right == 0.0 {
            0.0
        } else {
            return Err(Error::InvalidParameter("left junction energy must be positive".into()));
        };
        let e_l = self.e_l();
        let mut p = SquidParams::new(self.effective_e_c(), self.e_j_left, d_ej, self.e_j_left / (4.0 * e_l))
            .with_phase(phi_ext)
            .with_ng(n_g);
        p.right_alpha_correction = Some(e_l);
        p.validate()?;
        Ok(p)
    }

    /// Dims with the charge cutoff trimmed on the second-harmonic model at
    /// the given biases.
    pub fn default_dims(&self, phases: &[f64], n_g: f64, levels: usize) -> Result<FullSquidDims> {
        let problems = phases
            .iter()
            .map(|&phi| {
                let p = self.approximate_params(phi, n_g)?;
                Ok(SingleModeProblem {
                    potential: crate::squid::build_squid_potential(&p)?,
                    e_c: p.e_c,
                    n_g,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = smallest_cutoff(&problems, levels, CUTOFF_TOLERANCE)?;
        Ok(FullSquidDims::new(basis.cutoff))
    }

    /// Dense Hamiltonian over θ ⊗ φ ⊗ ϕ, GHz.
    pub fn hamiltonian(&self, phi_ext: f64, n_g: f64, dims: &FullSquidDims) -> Result<Mat<c64>> {
        self.validate()?;
        ensure_finite("phi_ext", phi_ext)?;
        ensure_finite("n_g", n_g)?;
        if dims.charge_cutoff == 0 {
            return Err(Error::CutoffTooSmall { order: 1, cutoff: 0 });
        }
        let basis = ChargeBasisSpec::new(dims.charge_cutoff);
        let layout = TensorLayout::new(&[dims.theta, dims.phi, basis.dimension()], &dims.order, dims.cap)?;
        let e_l = self.e_l();
        let theta = mode_operators(self.e_c_theta(), 2.0 * e_l, dims.theta)?;
        let phi = mode_operators(self.e_c_phi(), 0.5 * e_l, dims.phi)?;

        let d = dims.phi;
        let phi_total = Mat::from_fn(d, d, |r, c| {
            phi.phi[(r, c)]
                + if r == c {
                    c64::new(phi_ext, 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
        });
        let cos_half = trig_of_position(&phi_total, Trig::Cos, 0.5)?;
        let sin_half = trig_of_position(&phi_total, Trig::Sin, 0.5)?;
        let q = offset_charges(basis, n_g);
        let q2: Vec<f64> = q.iter().map(|x| 4.0 * self.e_c_varphi() * x * x).collect();
        let cos_v = charge_cos(basis);
        let sin_v = charge_sin(basis);

        let n = layout.dimension();
        let mut h = Mat::<c64>::zeros(n, n);
        use Factor::*;
        layout.add(&mut h, 1.0, &[Diagonal(&theta.energies()), Identity, Identity]);
        layout.add(&mut h, 1.0, &[Identity, Diagonal(&phi.energies()), Identity]);
        layout.add(&mut h, 1.0, &[Identity, Identity, Diagonal(&q2)]);
        layout.add(&mut h, -self.coupling(), &[Dense(&theta.n), Identity, Diagonal(&q)]);
        // −E_R cos(φ/2 − ϕ) − E_L cos(φ/2 + ϕ)
        layout.add(
            &mut h,
            -(self.e_j_left + self.e_j_right),
            &[Identity, Dense(&cos_half), Dense(&cos_v)],
        );
        layout.add(
            &mut h,
            self.e_j_left - self.e_j_right,
            &[Identity, Dense(&sin_half), Dense(&sin_v)],
        );
        Ok(h)
    }

    /// Lowest `levels` eigenvalues, GHz.
    pub fn levels(&self, phi_ext: f64, n_g: f64, dims: &FullSquidDims, levels: usize) -> Result<Vec<f64>> {
        eigenvalues(&self.hamiltonian(phi_ext, n_g, dims)?, levels)
    }
}

/// Single junction in series with an inductor, shunted by C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonInductorCircuit {
    pub c_ff: f64,
    pub c_j_ff: f64,
    pub inductance_ph: f64,
    /// GHz
    pub e_j: f64,
    pub n_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonInductorDims {
    pub inductor: usize,
    pub charge_cutoff: usize,
    /// Storage order of the (inductor, island) factors, outermost first.
    pub order: [usize; 2],
    pub cap: usize,
}

impl TransmonInductorDims {
    pub fn new(inductor: usize, charge_cutoff: usize) -> Self {
        Self {
            inductor,
            charge_cutoff,
            order: [0, 1],
            cap: DEFAULT_DIMENSION_CAP,
        }
    }
}

impl TransmonInductorCircuit {
    pub fn validate(&self) -> Result<()> {
        positive("C", self.c_ff)?;
        positive("C_J", self.c_j_ff)?;
        positive("L", self.inductance_ph)?;
        positive("E_J", self.e_j)?;
        ensure_finite("n_g", self.n_g)
    }

    pub fn e_c(&self) -> f64 {
        units::charging_energy(self.c_ff)
    }

    pub fn e_cj(&self) -> f64 {
        units::charging_energy(self.c_j_ff)
    }

    pub fn e_l(&self) -> f64 {
        units::inductive_energy(self.inductance_ph)
    }

    /// Charging energy e²/2(C + C_J) of the reduced single-mode model.
    pub fn effective_e_c(&self) -> f64 {
        units::charging_energy(self.c_ff + self.c_j_ff)
    }

    /// −E_J cos φ + E_J²/(4E_L) cos 2φ.
    pub fn approximate_problem(&self) -> Result<SingleModeProblem> {
        self.validate()?;
        Ok(SingleModeProblem {
            potential: HarmonicPotential::from_terms([
                HarmonicTerm::new(1, -self.e_j, 0.0),
                HarmonicTerm::new(2, self.e_j * self.e_j / (4.0 * self.e_l()), 0.0),
            ])?,
            e_c: self.effective_e_c(),
            n_g: self.n_g,
        })
    }

    /// Inductor dimension 40 and a charge cutoff trimmed on the reduced model.
    pub fn default_dims(&self, levels: usize) -> Result<TransmonInductorDims> {
        let basis = smallest_cutoff(&[self.approximate_problem()?], levels, CUTOFF_TOLERANCE)?;
        Ok(TransmonInductorDims::new(40, basis.cutoff))
    }

    /// Dense Hamiltonian over (inductor oscillator) ⊗ (island charge), GHz.
    pub fn hamiltonian(&self, dims: &TransmonInductorDims) -> Result<Mat<c64>> {
        self.validate()?;
        if dims.charge_cutoff == 0 {
            return Err(Error::CutoffTooSmall { order: 1, cutoff: 0 });
        }
        let basis = ChargeBasisSpec::new(dims.charge_cutoff);
        let layout = TensorLayout::new(&[dims.inductor, basis.dimension()], &dims.order, dims.cap)?;
        let e_c = self.e_c();
        let ind = mode_operators(e_c + self.e_cj(), self.e_l(), dims.inductor)?;
        let cos_l = trig_of_position(&ind.phi, Trig::Cos, 1.0)?;
        let sin_l = trig_of_position(&ind.phi, Trig::Sin, 1.0)?;
        let q = offset_charges(basis, self.n_g);
        let q2: Vec<f64> = q.iter().map(|x| 4.0 * e_c * x * x).collect();

        let n = layout.dimension();
        let mut h = Mat::<c64>::zeros(n, n);
        use Factor::*;
        layout.add(&mut h, 1.0, &[Diagonal(&ind.energies()), Identity]);
        layout.add(&mut h, 1.0, &[Identity, Diagonal(&q2)]);
        layout.add(&mut h, 8.0 * e_c, &[Dense(&ind.n), Diagonal(&q)]);
        // −E_J cos(φ − φ_L) = −E_J[cos φ cos φ_L + sin φ sin φ_L]
        layout.add(&mut h, -self.e_j, &[Dense(&cos_l), Dense(&charge_cos(basis))]);
        layout.add(&mut h, -self.e_j, &[Dense(&sin_l), Dense(&charge_sin(basis))]);
        Ok(h)
    }

    pub fn levels(&self, dims: &TransmonInductorDims, levels: usize) -> Result<Vec<f64>> {
        eigenvalues(&self.hamiltonian(dims)?, levels)
    }
}
