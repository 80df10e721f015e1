//! CSV row types. Header names carry units and are a stable contract.

use std::io::Read;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub flux_phi0: f64,
    pub ng: f64,
    pub i: usize,
    pub j: usize,
    #[serde(rename = "omega_GHz")]
    pub omega_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub flux_phi0: f64,
    pub i: usize,
    pub j: usize,
    pub ng: f64,
    #[serde(rename = "frequency_GHz")]
    pub frequency_ghz: f64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub flux_phi0: f64,
    pub i: usize,
    pub j: usize,
    pub ng: f64,
    #[serde(rename = "frequency_GHz")]
    pub frequency_ghz: f64,
    pub weight: f64,
    #[serde(rename = "weighted_residual_GHz")]
    pub weighted_residual_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    #[serde(rename = "E_J1_GHz")]
    pub e_j1_ghz: f64,
    pub ratio: f64,
    #[serde(rename = "sigma_E_J1_GHz")]
    pub sigma_e_j1_ghz: f64,
    pub sigma_ratio: f64,
    /// Optional; rows above the configured threshold are excluded.
    #[serde(default)]
    pub asymmetry_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityRow {
    pub quantity: String,
    pub value: f64,
    pub sigma: Option<f64>,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiodeRow {
    pub flux_phi0: f64,
    #[serde(rename = "I_max_uA")]
    pub i_max_ua: f64,
    #[serde(rename = "I_min_uA")]
    pub i_min_ua: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullSquidRow {
    pub flux_phi0: f64,
    pub i: usize,
    #[serde(rename = "omega_full_GHz")]
    pub omega_full_ghz: f64,
    #[serde(rename = "omega_approx_GHz")]
    pub omega_approx_ghz: f64,
    #[serde(rename = "difference_GHz")]
    pub difference_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonInductorRow {
    pub i: usize,
    #[serde(rename = "omega_full_GHz")]
    pub omega_full_ghz: f64,
    #[serde(rename = "omega_approx_GHz")]
    pub omega_approx_ghz: f64,
    #[serde(rename = "difference_GHz")]
    pub difference_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveRow {
    pub flux_phi0: f64,
    #[serde(rename = "shift_GHz")]
    pub shift_ghz: f64,
}

/// Serializes rows with a header line; the header is written even for no rows.
pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| CliError::config(e.to_string()))
}

/// Parses rows, requiring every column in `required` to be present.
pub fn from_csv<T: DeserializeOwned, R: Read>(reader: R, required: &[&str], source: &str) -> Result<Vec<T>, CliError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = r.headers().map_err(csv_error)?.clone();
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(CliError::config(format!("{source}: missing column `{col}`")));
        }
    }
    r.deserialize()
        .enumerate()
        .map(|(k, row)| row.map_err(|e| CliError::config(format!("{source}: row {}: {e}", k + 1))))
        .collect()
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::config(e.to_string())
}

pub const SPECTRUM_HEADER: [&str; 5] = ["flux_phi0", "ng", "i", "j", "omega_GHz"];
pub const DATASET_HEADER: [&str; 6] = ["flux_phi0", "i", "j", "ng", "frequency_GHz", "weight"];
pub const DATASET_REQUIRED: [&str; 5] = ["flux_phi0", "i", "j", "ng", "frequency_GHz"];
pub const RESIDUAL_HEADER: [&str; 7] = [
    "flux_phi0",
    "i",
    "j",
    "ng",
    "frequency_GHz",
    "weight",
    "weighted_residual_GHz",
];
pub const RATIO_HEADER: [&str; 4] = ["E_J1_GHz", "ratio", "sigma_E_J1_GHz", "sigma_ratio"];
pub const QUANTITY_HEADER: [&str; 4] = ["quantity", "value", "sigma", "unit"];
pub const DIODE_HEADER: [&str; 4] = ["flux_phi0", "I_max_uA", "I_min_uA", "eta"];
pub const FULL_SQUID_HEADER: [&str; 5] = ["flux_phi0", "i", "omega_full_GHz", "omega_approx_GHz", "difference_GHz"];
pub const TRANSMON_INDUCTOR_HEADER: [&str; 4] = ["i", "omega_full_GHz", "omega_approx_GHz", "difference_GHz"];
pub const DISPERSIVE_HEADER: [&str; 2] = ["flux_phi0", "shift_GHz"];
