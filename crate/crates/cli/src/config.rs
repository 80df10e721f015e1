//! Run configuration. Every physical key carries its unit in the name.

use serde::{Deserialize, Serialize};
use squid_harmonics::devices::{Device, NOMINAL_INDUCTANCE_PH};
use squid_harmonics::fitting::{FitBounds, FitParams};
use squid_harmonics::spectrum::linspace;
use squid_harmonics::squid::{alpha_from_inductance, asymmetry_to_d_ej, SquidParams};
use squid_harmonics::units::inductive_energy;

use crate::CliError;

/// Chip A table shipped with the binary.
pub const CHIP_A_CONFIG: &str = include_str!("../configs/chipA.config");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChipEntry {
    pub junction_length_um: u32,
    #[serde(rename = "E_C_GHz")]
    pub e_c_ghz: f64,
    #[serde(rename = "E_J1_L_GHz")]
    pub e_j1_left_ghz: f64,
    pub asymmetry_percent: f64,
    #[serde(rename = "omega_r_GHz")]
    pub omega_r_ghz: f64,
    #[serde(rename = "g_c_MHz")]
    pub g_c_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChipFile {
    device: Vec<ChipEntry>,
}

pub fn chip_a_table() -> Vec<ChipEntry> {
    toml::from_str::<ChipFile>(CHIP_A_CONFIG)
        .expect("bundled chip table parses")
        .device
}

impl ChipEntry {
    pub fn to_device(&self) -> Device {
        Device {
            junction_length_um: f64::from(self.junction_length_um),
            e_c: self.e_c_ghz,
            e_j1_left: self.e_j1_left_ghz,
            asymmetry_percent: self.asymmetry_percent,
            omega_r: self.omega_r_ghz,
            g_c_mhz: self.g_c_mhz,
        }
    }
}

/// Uniform flux grid in units of Φ₀, end points included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxGrid {
    pub start_phi0: f64,
    pub stop_phi0: f64,
    pub points: usize,
}

impl FluxGrid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.points == 0 || !self.start_phi0.is_finite() || !self.stop_phi0.is_finite() {
            return Err(CliError::config(
                "flux grid needs finite end points and at least one point",
            ));
        }
        Ok(linspace(self.start_phi0, self.stop_phi0, self.points))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceBlock {
    /// Start from the bundled Chip A entry with this junction length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chip_a_junction_um: Option<u32>,
    #[serde(rename = "E_C_GHz", default, skip_serializing_if = "Option::is_none")]
    pub e_c_ghz: Option<f64>,
    #[serde(rename = "E_J1_L_GHz", default, skip_serializing_if = "Option::is_none")]
    pub e_j1_left_ghz: Option<f64>,
    #[serde(rename = "dE_J", default, skip_serializing_if = "Option::is_none")]
    pub d_ej: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymmetry_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Series inductance per arm; sets α = β + E_J1/(4E_L) when `alpha` is absent.
    #[serde(rename = "series_inductance_pH", default, skip_serializing_if = "Option::is_none")]
    pub series_inductance_ph: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Apply −E_J1_L·dE_J/(4E_L) to the right-arm ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_alpha_correction: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ng: Option<f64>,
    #[serde(rename = "omega_r_GHz", default, skip_serializing_if = "Option::is_none")]
    pub omega_r_ghz: Option<f64>,
    #[serde(rename = "g_c_MHz", default, skip_serializing_if = "Option::is_none")]
    pub g_c_mhz: Option<f64>,
}

/// Device block with the chip entry and overrides merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedDevice {
    pub params: SquidParams,
    pub inductance_ph: Option<f64>,
    pub omega_r: Option<f64>,
    pub g_c: Option<f64>,
    pub chip: Option<Device>,
}

impl DeviceBlock {
    pub fn resolve(&self) -> Result<ResolvedDevice, CliError> {
        let chip = match self.chip_a_junction_um {
            Some(um) => Some(
                chip_a_table()
                    .into_iter()
                    .find(|e| e.junction_length_um == um)
                    .ok_or_else(|| CliError::config(format!("no Chip A device with a {um} um junction")))?
                    .to_device(),
            ),
            None => None,
        };
        let e_c = self
            .e_c_ghz
            .or(chip.map(|c| c.e_c))
            .ok_or_else(|| CliError::config("device.E_C_GHz is required"))?;
        let e_j = self
            .e_j1_left_ghz
            .or(chip.map(|c| c.e_j1_left))
            .ok_or_else(|| CliError::config("device.E_J1_L_GHz is required"))?;
        let d_ej = match (self.d_ej, self.asymmetry_percent) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "give device.dE_J or device.asymmetry_percent, not both",
                ))
            }
            (Some(d), None) => d,
            (None, Some(a)) => asymmetry_to_d_ej(a / 100.0),
            (None, None) => chip.map(|c| c.d_ej()).unwrap_or(0.0),
        };
        let inductance = self.series_inductance_ph.or(chip.map(|_| NOMINAL_INDUCTANCE_PH));
        let alpha = match (self.alpha, inductance) {
            (Some(a), _) => {
                if self.series_inductance_ph.is_some() && self.beta.is_some() {
                    return Err(CliError::config("device.alpha excludes device.beta"));
                }
                a
            }
            (None, Some(l)) => alpha_from_inductance(e_j, l, self.beta.unwrap_or(0.0)),
            (None, None) => {
                return Err(CliError::config(
                    "device.alpha or device.series_inductance_pH is required",
                ))
            }
        };
        let mut params = SquidParams::new(e_c, e_j, d_ej, alpha).with_ng(self.ng.unwrap_or(0.0));
        if self.right_alpha_correction.unwrap_or(false) {
            let l = inductance
                .ok_or_else(|| CliError::config("right_alpha_correction needs device.series_inductance_pH"))?;
            params.right_alpha_correction = Some(inductive_energy(l));
        }
        params.validate()?;
        Ok(ResolvedDevice {
            params,
            inductance_ph: inductance,
            omega_r: self.omega_r_ghz.or(chip.map(|c| c.omega_r)),
            g_c: self.g_c_mhz.map(|g| g * 1e-3).or(chip.map(|c| c.g_c())),
            chip,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisBlock {
    /// Fixed charge cutoff N (basis −N..=N); automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_cutoff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub flux: FluxGrid,
    pub ng: Vec<f64>,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthBlock {
    pub near: FluxGrid,
    pub away: FluxGrid,
    pub ng: Vec<f64>,
    pub max_level: usize,
    #[serde(default)]
    pub include_j1: bool,
    #[serde(rename = "sigma_MHz")]
    pub sigma_mhz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitPoint {
    #[serde(rename = "E_C_GHz")]
    pub e_c_ghz: f64,
    #[serde(rename = "E_J1_L_GHz")]
    pub e_j1_left_ghz: f64,
    #[serde(rename = "dE_J")]
    pub d_ej: f64,
    pub alpha: f64,
}

impl From<FitPoint> for FitParams {
    fn from(p: FitPoint) -> Self {
        FitParams::from_array([p.e_c_ghz, p.e_j1_left_ghz, p.d_ej, p.alpha])
    }
}

impl From<FitParams> for FitPoint {
    fn from(p: FitParams) -> Self {
        Self {
            e_c_ghz: p.e_c,
            e_j1_left_ghz: p.e_j1_left,
            d_ej: p.d_ej,
            alpha: p.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsBlock {
    pub lower: FitPoint,
    pub upper: FitPoint,
}

impl From<BoundsBlock> for FitBounds {
    fn from(b: BoundsBlock) -> Self {
        FitBounds {
            lower: FitParams::from(b.lower).to_array(),
            upper: FitParams::from(b.upper).to_array(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    /// Start point; a coarse grid scan picks one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<FitPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_points: Option<usize>,
    /// Inductance used for the right-arm α correction, if enabled.
    #[serde(
        rename = "right_alpha_correction_pH",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub right_alpha_correction_ph: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdrBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    /// Rows whose asymmetry_percent column exceeds this are dropped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_asymmetry_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiodeBlock {
    pub flux: FluxGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultimodeModel {
    FullSquid,
    TransmonInductor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimodeBlock {
    pub model: MultimodeModel,
    pub transitions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<FluxGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ng: Option<f64>,
    /// Per arm (full SQUID) or in series (transmon+inductor).
    #[serde(rename = "inductance_pH", default, skip_serializing_if = "Option::is_none")]
    pub inductance_ph: Option<f64>,
    /// Overrides the inductance through L = (Φ₀/2π)²/(h·E_L).
    #[serde(rename = "E_L_GHz", default, skip_serializing_if = "Option::is_none")]
    pub e_l_ghz: Option<f64>,
    #[serde(rename = "C_sh_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_sh_ff: Option<f64>,
    #[serde(rename = "C_J_L_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_j_left_ff: Option<f64>,
    #[serde(rename = "C_J_R_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_j_right_ff: Option<f64>,
    #[serde(rename = "C_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_ff: Option<f64>,
    #[serde(rename = "C_J_fF", default, skip_serializing_if = "Option::is_none")]
    pub c_j_ff: Option<f64>,
    #[serde(rename = "E_J_GHz", default, skip_serializing_if = "Option::is_none")]
    pub e_j_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inductor_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_cutoff: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Perturbative,
    ExactDressed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveBlock {
    pub flux: FluxGrid,
    pub method: MethodName,
    #[serde(rename = "omega_r_GHz", default, skip_serializing_if = "Option::is_none")]
    pub omega_r_ghz: Option<f64>,
    #[serde(rename = "g_c_MHz", default, skip_serializing_if = "Option::is_none")]
    pub g_c_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device_state: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odr: Option<OdrBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diode: Option<DiodeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multimode: Option<MultimodeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersive: Option<DispersiveBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config: {}", e.message())))
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {path}: {e}")))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn device(&self) -> Result<ResolvedDevice, CliError> {
        self.device
            .as_ref()
            .ok_or_else(|| CliError::config("a [device] block is required"))?
            .resolve()
    }

    pub fn block<'a, T>(&self, block: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        block
            .as_ref()
            .ok_or_else(|| CliError::config(format!("a [{name}] block is required")))
    }
}
