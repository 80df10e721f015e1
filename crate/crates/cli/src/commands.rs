//! One function per subcommand. Each returns the table bytes and the envelope
//! payload; nothing touches the filesystem except input reads.

use std::fs::File;

use serde::Serialize;
use serde_json::{json, Value};
use squid_harmonics::charge::ChargeBasisSpec;
use squid_harmonics::fitting::{
    coarse_initial_guess, deming_fit, fit_spectrum, inductance_and_beta, synthesize, DatasetProvenance, FitBounds,
    FitOptions, RatioPoint, SynthPlan, TransitionDataset, TransitionRecord, DEFAULT_MAX_ASYMMETRY_PERCENT,
    PARAMETER_NAMES,
};
use squid_harmonics::multimode::{
    full_squid_discrepancy, transmon_inductor_discrepancy, FullSquidCircuit, FullSquidDims, TransmonInductorCircuit,
    TransmonInductorDims,
};
use squid_harmonics::observables::{diode_scan, dispersive_report, DispersiveMethod, DispersiveOptions};
use squid_harmonics::spectrum::{transition_spectrum, transition_spectrum_with_basis};
use squid_harmonics::units::{inductance, inductive_energy};

use crate::config::{MethodName, MultimodeModel, RunConfig};
use crate::tables::*;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Fit,
    Odr,
    Synth,
    Diode,
    Multimode,
    Dispersive,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Fit => "fit",
            Command::Odr => "odr",
            Command::Synth => "synth",
            Command::Diode => "diode",
            Command::Multimode => "multimode",
            Command::Dispersive => "dispersive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub table: Vec<u8>,
    pub header: Vec<String>,
    pub rows: usize,
    pub payload: Value,
    pub notes: Vec<String>,
}

impl Output {
    fn new<T: Serialize>(rows: &[T], header: &[&str], payload: Value, notes: Vec<String>) -> Result<Self, CliError> {
        Ok(Self {
            table: to_csv(rows, header)?,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: rows.len(),
            payload,
            notes,
        })
    }
}

pub fn run(command: Command, config: &RunConfig) -> Result<Output, CliError> {
    match command {
        Command::Spectrum => spectrum(config),
        Command::Fit => fit(config),
        Command::Odr => odr(config),
        Command::Synth => synth(config),
        Command::Diode => diode(config),
        Command::Multimode => multimode(config),
        Command::Dispersive => dispersive(config),
    }
}

fn spectrum(config: &RunConfig) -> Result<Output, CliError> {
    let device = config.device()?;
    let sweep = config.block(&config.sweep, "sweep")?;
    let fluxes = sweep.flux.values()?;
    let cutoff = config.basis.as_ref().and_then(|b| b.charge_cutoff);
    let s = match cutoff {
        Some(n) => transition_spectrum_with_basis(
            &device.params,
            &fluxes,
            &sweep.ng,
            sweep.levels,
            ChargeBasisSpec::new(n),
        )?,
        None => transition_spectrum(&device.params, &fluxes, &sweep.ng, sweep.levels)?,
    };
    let rows: Vec<SpectrumRow> = s
        .rows
        .iter()
        .map(|r| SpectrumRow {
            flux_phi0: r.flux_phi0,
            ng: r.ng,
            i: r.i,
            j: r.j,
            omega_ghz: r.omega_ghz,
        })
        .collect();
    let payload = json!({ "basis": s.basis, "levels": s.levels, "rows": rows });
    Output::new(&rows, &SPECTRUM_HEADER, payload, device.params.notes())
}

fn read_dataset(path: &str) -> Result<TransitionDataset, CliError> {
    let file = File::open(path).map_err(|e| CliError::config(format!("cannot read {path}: {e}")))?;
    let rows: Vec<DatasetRow> = from_csv(file, &DATASET_REQUIRED, path)?;
    let records = rows
        .iter()
        .map(|r| TransitionRecord {
            flux_phi0: r.flux_phi0,
            i: r.i,
            j: r.j,
            ng: r.ng,
            frequency: r.frequency_ghz,
            weight: r.weight,
        })
        .collect();
    Ok(TransitionDataset::new(records, DatasetProvenance::Measured)?)
}

fn fit(config: &RunConfig) -> Result<Output, CliError> {
    let block = config.fit.clone().unwrap_or_default();
    let path = block
        .data
        .as_deref()
        .ok_or_else(|| CliError::config("fit needs a dataset: set fit.data or pass --data"))?;
    let data = read_dataset(path)?;
    let bounds = block.bounds.map(FitBounds::from).unwrap_or_default();
    let init = match block.init {
        Some(p) => p.into(),
        None => coarse_initial_guess(&data, &bounds, block.coarse_points.unwrap_or(4))?,
    };
    let defaults = FitOptions::default();
    let options = FitOptions {
        bounds,
        starts: block.starts.unwrap_or(defaults.starts),
        seed: config.seed.unwrap_or(0),
        max_evaluations: block.max_evaluations.unwrap_or(defaults.max_evaluations),
        right_alpha_correction: block.right_alpha_correction_ph.map(inductive_energy),
        ..defaults
    };
    let result = fit_spectrum(&data, init, &options)?;
    let rows: Vec<ResidualRow> = data
        .records
        .iter()
        .zip(&result.residuals)
        .map(|(r, res)| ResidualRow {
            flux_phi0: r.flux_phi0,
            i: r.i,
            j: r.j,
            ng: r.ng,
            frequency_ghz: r.frequency,
            weight: r.weight,
            weighted_residual_ghz: *res,
        })
        .collect();
    let params: serde_json::Map<String, Value> = PARAMETER_NAMES
        .iter()
        .zip(result.params.to_array())
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    let sigmas: serde_json::Map<String, Value> = PARAMETER_NAMES
        .iter()
        .zip(result.uncertainties)
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    let mut notes = Vec::new();
    if result.diagnostics.restarts > 0 {
        notes.push(format!(
            "{} restart(s) from the best point",
            result.diagnostics.restarts
        ));
    }
    let payload = json!({
        "init": init,
        "params": params,
        "uncertainties": sigmas,
        "covariance": result.covariance,
        "reduced_chi2": result.reduced_chi2,
        "residual_norm_GHz2": result.residual_norm,
        "diagnostics": result.diagnostics,
        "rows": rows,
    });
    Output::new(&rows, &RESIDUAL_HEADER, payload, notes)
}

fn odr(config: &RunConfig) -> Result<Output, CliError> {
    let block = config.odr.clone().unwrap_or_default();
    let path = block
        .data
        .as_deref()
        .ok_or_else(|| CliError::config("odr needs a ratio file: set odr.data or pass --data"))?;
    let threshold = block.max_asymmetry_percent.unwrap_or(DEFAULT_MAX_ASYMMETRY_PERCENT);
    let file = File::open(path).map_err(|e| CliError::config(format!("cannot read {path}: {e}")))?;
    let input: Vec<RatioRow> = from_csv(file, &RATIO_HEADER, path)?;
    let mut notes = Vec::new();
    let mut excluded = Vec::new();
    let points: Vec<RatioPoint> = input
        .iter()
        .enumerate()
        .filter(|(k, r)| {
            let keep = r.asymmetry_percent.is_none_or(|a| a.abs() <= threshold);
            if !keep {
                excluded.push(k + 1);
            }
            keep
        })
        .map(|(_, r)| RatioPoint {
            x: r.e_j1_ghz,
            y: r.ratio,
            sigma_x: r.sigma_e_j1_ghz,
            sigma_y: r.sigma_ratio,
        })
        .collect();
    if !excluded.is_empty() {
        notes.push(format!("rows {excluded:?} excluded: asymmetry above {threshold}%"));
    }
    let line = deming_fit(&points)?;
    let est = inductance_and_beta(&line);
    let q = |quantity: &str, value: f64, sigma: Option<f64>, unit: &str| QuantityRow {
        quantity: quantity.into(),
        value,
        sigma,
        unit: unit.into(),
    };
    let mut rows = vec![
        q("slope", line.slope, Some(line.slope_sigma), "1/GHz"),
        q("intercept", line.intercept, Some(line.intercept_sigma), "1"),
    ];
    match (est.inductance_ph, est.e_l_ghz) {
        (Some(l), Some(e_l)) => {
            rows.push(q("L", l, est.inductance_sigma_ph, "pH"));
            rows.push(q("E_L", e_l, Some(e_l * line.slope_sigma / line.slope), "GHz"));
        }
        _ => notes.push("slope is not positive; no series inductance is implied".into()),
    }
    rows.push(q("beta", est.beta, Some(est.beta_sigma), "1"));
    let payload = json!({
        "line": line,
        "estimate": est,
        "max_asymmetry_percent": threshold,
        "excluded_rows": excluded,
        "rows": rows,
    });
    Output::new(&rows, &QUANTITY_HEADER, payload, notes)
}

fn synth(config: &RunConfig) -> Result<Output, CliError> {
    let device = config.device()?;
    let block = config.block(&config.synth, "synth")?;
    let plan = SynthPlan {
        near: block.near.values()?,
        away: block.away.values()?,
        ngs: block.ng.clone(),
        max_level: block.max_level,
        include_j1: block.include_j1,
    };
    let seed = config.seed.unwrap_or(0);
    let data = synthesize(&device.params, &plan, block.sigma_mhz * 1e-3, seed)?;
    let rows: Vec<DatasetRow> = data
        .records
        .iter()
        .map(|r| DatasetRow {
            flux_phi0: r.flux_phi0,
            i: r.i,
            j: r.j,
            ng: r.ng,
            frequency_ghz: r.frequency,
            weight: r.weight,
        })
        .collect();
    let payload = json!({
        "provenance": data.provenance,
        "truth": {
            "E_C": device.params.e_c,
            "E_J1_L": device.params.e_j1_left,
            "dE_J": device.params.d_ej,
            "alpha": device.params.alpha,
        },
        "rows": rows,
    });
    Output::new(&rows, &DATASET_HEADER, payload, device.params.notes())
}

fn diode(config: &RunConfig) -> Result<Output, CliError> {
    let device = config.device()?;
    let block = config.block(&config.diode, "diode")?;
    let report = diode_scan(&device.params, &block.flux.values()?)?;
    let rows: Vec<DiodeRow> = report
        .points
        .iter()
        .map(|p| DiodeRow {
            flux_phi0: p.flux_phi0,
            i_max_ua: p.i_max,
            i_min_ua: p.i_min,
            eta: p.eta,
        })
        .collect();
    let payload = json!({ "grid_points": report.grid_points, "max_eta": report.max_eta(), "rows": rows });
    Output::new(&rows, &DIODE_HEADER, payload, device.params.notes())
}

fn multimode(config: &RunConfig) -> Result<Output, CliError> {
    let block = config.block(&config.multimode, "multimode")?;
    let device = config.device.as_ref().map(|d| d.resolve()).transpose()?;
    let l_ph = match (block.e_l_ghz, block.inductance_ph) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give multimode.E_L_GHz or multimode.inductance_pH, not both",
            ))
        }
        (Some(e_l), None) => inductance(e_l),
        (None, Some(l)) => l,
        (None, None) => device
            .and_then(|d| d.inductance_ph)
            .ok_or_else(|| CliError::config("multimode needs an inductance"))?,
    };
    let missing = |key: &str| CliError::config(format!("multimode.{key} is required"));
    match block.model {
        MultimodeModel::FullSquid => {
            let device = device.ok_or_else(|| CliError::config("the full-squid model needs a [device] block"))?;
            let chip = device.chip.map(|c| FullSquidCircuit::from_device(&c, l_ph));
            let circuit = FullSquidCircuit {
                c_j_left_ff: block
                    .c_j_left_ff
                    .or(chip.map(|c| c.c_j_left_ff))
                    .ok_or_else(|| missing("C_J_L_fF"))?,
                c_j_right_ff: block
                    .c_j_right_ff
                    .or(chip.map(|c| c.c_j_right_ff))
                    .ok_or_else(|| missing("C_J_R_fF"))?,
                c_sh_ff: block
                    .c_sh_ff
                    .or(chip.map(|c| c.c_sh_ff))
                    .ok_or_else(|| missing("C_sh_fF"))?,
                inductance_ph: l_ph,
                e_j_left: device.params.e_j1_left,
                e_j_right: device.params.e_j1_right(),
            };
            let fluxes = block.flux.ok_or_else(|| missing("flux"))?.values()?;
            let dims = match (block.theta_dim, block.phi_dim, block.charge_cutoff) {
                (None, None, None) => None,
                (t, p, Some(n)) => {
                    let mut d = FullSquidDims::new(n);
                    d.theta = t.unwrap_or(d.theta);
                    d.phi = p.unwrap_or(d.phi);
                    Some(d)
                }
                _ => return Err(missing("charge_cutoff")),
            };
            let table = full_squid_discrepancy(&circuit, &fluxes, block.ng.unwrap_or(0.0), block.transitions, dims)?;
            let rows: Vec<FullSquidRow> = table
                .rows
                .iter()
                .map(|r| FullSquidRow {
                    flux_phi0: r.flux_phi0,
                    i: r.i,
                    omega_full_ghz: r.omega_full,
                    omega_approx_ghz: r.omega_approx,
                    difference_ghz: r.difference(),
                })
                .collect();
            let payload = json!({
                "circuit": circuit,
                "effective_E_C_GHz": circuit.effective_e_c(),
                "max_difference_GHz": table.max(),
                "rows": rows,
            });
            Output::new(&rows, &FULL_SQUID_HEADER, payload, Vec::new())
        }
        MultimodeModel::TransmonInductor => {
            if block.flux.is_some() {
                return Err(CliError::config(
                    "the transmon-inductor model has no flux bias; drop multimode.flux",
                ));
            }
            let circuit = TransmonInductorCircuit {
                c_ff: block.c_ff.ok_or_else(|| missing("C_fF"))?,
                c_j_ff: block.c_j_ff.ok_or_else(|| missing("C_J_fF"))?,
                inductance_ph: l_ph,
                e_j: block.e_j_ghz.ok_or_else(|| missing("E_J_GHz"))?,
                n_g: block.ng.unwrap_or(0.0),
            };
            let dims = match (block.inductor_dim, block.charge_cutoff) {
                (None, None) => None,
                (Some(m), Some(n)) => Some(TransmonInductorDims::new(m, n)),
                (None, Some(_)) => return Err(missing("inductor_dim")),
                (Some(_), None) => return Err(missing("charge_cutoff")),
            };
            let table = transmon_inductor_discrepancy(&circuit, block.transitions, dims)?;
            let rows: Vec<TransmonInductorRow> = table
                .rows
                .iter()
                .map(|r| TransmonInductorRow {
                    i: r.i,
                    omega_full_ghz: r.omega_full,
                    omega_approx_ghz: r.omega_approx,
                    difference_ghz: r.difference(),
                })
                .collect();
            let payload = json!({
                "circuit": circuit,
                "effective_E_C_GHz": circuit.effective_e_c(),
                "max_difference_GHz": table.max(),
                "rows": rows,
            });
            Output::new(&rows, &TRANSMON_INDUCTOR_HEADER, payload, Vec::new())
        }
    }
}

fn dispersive(config: &RunConfig) -> Result<Output, CliError> {
    let device = config.device()?;
    let block = config.block(&config.dispersive, "dispersive")?;
    let omega_r = block
        .omega_r_ghz
        .or(device.omega_r)
        .ok_or_else(|| CliError::config("dispersive needs omega_r_GHz"))?;
    let g_c = block
        .g_c_mhz
        .map(|g| g * 1e-3)
        .or(device.g_c)
        .ok_or_else(|| CliError::config("dispersive needs g_c_MHz"))?;
    let defaults = DispersiveOptions::default();
    let options = DispersiveOptions {
        level_cap: block.level_cap.unwrap_or(defaults.level_cap),
        photons: block.photons.unwrap_or(defaults.photons),
        device_state: block.device_state.unwrap_or(defaults.device_state),
    };
    let method = match block.method {
        MethodName::Perturbative => DispersiveMethod::Perturbative,
        MethodName::ExactDressed => DispersiveMethod::ExactDressed,
    };
    let report = dispersive_report(&device.params, &block.flux.values()?, omega_r, g_c, method, options)?;
    let rows: Vec<DispersiveRow> = report
        .fluxes
        .iter()
        .zip(&report.shifts)
        .map(|(&flux_phi0, &shift_ghz)| DispersiveRow { flux_phi0, shift_ghz })
        .collect();
    let payload = json!({
        "omega_r_GHz": report.omega_r,
        "g_c_GHz": report.g_c,
        "device_state": report.device_state,
        "method": report.method,
        "rows": rows,
    });
    Output::new(&rows, &DISPERSIVE_HEADER, payload, report.warnings)
}
