//! Browser bindings for the static demo in `www/`. Results come back as flat
//! `Float64Array`s; the layout of each is documented on the function.

use squid_harmonics::devices::chip_a;
use squid_harmonics::observables::{diode_scan, export_potential_and_wavefunctions};
use squid_harmonics::spectrum::{linspace, transition_spectrum};
use squid_harmonics::squid::SquidParams;
use squid_harmonics::units::flux_to_phase;
use wasm_bindgen::prelude::*;

fn js_error(e: squid_harmonics::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn params(e_c: f64, e_j1_left: f64, d_ej: f64, alpha: f64, ng: f64) -> SquidParams {
    SquidParams::new(e_c, e_j1_left, d_ej, alpha).with_ng(ng)
}

/// `[E_C, E_J1_L, dE_J, alpha]` of a Chip A device at the nominal 10 pH, or
/// an empty array for an unknown junction length.
#[wasm_bindgen]
pub fn chip_a_params(junction_um: u32) -> Vec<f64> {
    chip_a(junction_um)
        .map(|d| {
            let p = d.squid_params();
            vec![p.e_c, p.e_j1_left, p.d_ej, p.alpha]
        })
        .unwrap_or_default()
}

/// ω_{i0} for i = 1..levels over `points` fluxes in [start, stop] (Φ₀).
/// Row-major: `points` rows of `levels − 1` values, GHz.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn transition_curves(
    e_c: f64,
    e_j1_left: f64,
    d_ej: f64,
    alpha: f64,
    ng: f64,
    start: f64,
    stop: f64,
    points: usize,
    levels: usize,
) -> Result<Vec<f64>, JsError> {
    let fluxes = linspace(start, stop, points);
    let s = transition_spectrum(&params(e_c, e_j1_left, d_ej, alpha, ng), &fluxes, &[ng], levels).map_err(js_error)?;
    Ok(s.rows.iter().filter(|r| r.j == 0).map(|r| r.omega_ghz).collect())
}

/// U(φ) and the lowest `levels` densities on `points` phases over [−π, π).
/// Layout: φ (points), U − min U (points), energies − E₀ (levels), then one
/// density per level (points each).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn potential_and_densities(
    e_c: f64,
    e_j1_left: f64,
    d_ej: f64,
    alpha: f64,
    ng: f64,
    flux: f64,
    levels: usize,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let p = params(e_c, e_j1_left, d_ej, alpha, ng).with_phase(flux_to_phase(flux));
    let phis: Vec<f64> = (0..points)
        .map(|k| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / points as f64)
        .collect();
    let x = export_potential_and_wavefunctions(&p, &phis, levels, None).map_err(js_error)?;
    let u0 = x.potential.iter().copied().fold(f64::INFINITY, f64::min);
    let e0 = x.energies[0];
    let mut out = x.phi;
    out.extend(x.potential.iter().map(|u| u - u0));
    out.extend(x.energies.iter().take(levels).map(|e| e - e0));
    for d in x.densities {
        out.extend(d);
    }
    Ok(out)
}

/// Rows of `[flux, I_max (µA), I_min (µA), eta]` over `points` fluxes.
#[wasm_bindgen]
pub fn diode_curve(
    e_c: f64,
    e_j1_left: f64,
    d_ej: f64,
    alpha: f64,
    start: f64,
    stop: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let r = diode_scan(
        &params(e_c, e_j1_left, d_ej, alpha, 0.0),
        &linspace(start, stop, points),
    )
    .map_err(js_error)?;
    Ok(r.points
        .iter()
        .flat_map(|p| [p.flux_phi0, p.i_max, p.i_min, p.eta])
        .collect())
}
