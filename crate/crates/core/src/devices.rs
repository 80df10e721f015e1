//! Chip A device table.

use serde::{Deserialize, Serialize};

use crate::squid::{alpha_from_inductance, asymmetry_to_d_ej, SquidParams};
use crate::units;

/// Nominal shunt capacitance, fF.
pub const SHUNT_CAPACITANCE_FF: f64 = 73.0;
/// Series inductance per arm, pH.
pub const NOMINAL_INDUCTANCE_PH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub junction_length_um: f64,
    /// GHz
    pub e_c: f64,
    /// GHz
    pub e_j1_left: f64,
    /// (E_L − E_R)/(E_L + E_R) in percent.
    pub asymmetry_percent: f64,
    /// GHz
    pub omega_r: f64,
    /// MHz
    pub g_c_mhz: f64,
}

pub const CHIP_A: [Device; 5] = [
    Device {
        junction_length_um: 2.0,
        e_c: 0.161,
        e_j1_left: 84.0,
        asymmetry_percent: 0.74,
        omega_r: 7.5657,
        g_c_mhz: 52.0,
    },
    Device {
        junction_length_um: 3.0,
        e_c: 0.138,
        e_j1_left: 125.0,
        asymmetry_percent: 1.02,
        omega_r: 7.5891,
        g_c_mhz: 43.6,
    },
    Device {
        junction_length_um: 4.0,
        e_c: 0.118,
        e_j1_left: 167.0,
        asymmetry_percent: 0.39,
        omega_r: 7.6252,
        g_c_mhz: 38.1,
    },
    Device {
        junction_length_um: 5.0,
        e_c: 0.104,
        e_j1_left: 203.0,
        asymmetry_percent: 0.27,
        omega_r: 7.6542,
        g_c_mhz: 33.9,
    },
    Device {
        junction_length_um: 6.0,
        e_c: 0.0956,
        e_j1_left: 231.0,
        asymmetry_percent: 0.33,
        omega_r: 7.6918,
        g_c_mhz: 30.8,
    },
];

/// Entry with the given junction length (µm).
pub fn chip_a(length_um: u32) -> Option<Device> {
    CHIP_A
        .iter()
        .copied()
        .find(|d| d.junction_length_um == f64::from(length_um))
}

impl Device {
    pub fn d_ej(&self) -> f64 {
        asymmetry_to_d_ej(self.asymmetry_percent / 100.0)
    }

    pub fn e_j1_right(&self) -> f64 {
        self.e_j1_left * (1.0 - self.d_ej())
    }

    /// GHz
    pub fn g_c(&self) -> f64 {
        self.g_c_mhz * 1e-3
    }

    /// Second-harmonic ratio from series inductance `l_ph` plus intrinsic `beta`.
    pub fn alpha(&self, l_ph: f64, beta: f64) -> f64 {
        alpha_from_inductance(self.e_j1_left, l_ph, beta)
    }

    /// Fit parameterization with α from the nominal inductance and no intrinsic part.
    pub fn squid_params(&self) -> SquidParams {
        SquidParams::new(
            self.e_c,
            self.e_j1_left,
            self.d_ej(),
            self.alpha(NOMINAL_INDUCTANCE_PH, 0.0),
        )
    }

    /// Total capacitance e²/(2E_C), fF.
    pub fn total_capacitance(&self) -> f64 {
        units::capacitance(self.e_c)
    }

    /// (C_J^L, C_J^R) in fF: total minus shunt, split in proportion to junction
    /// length. Both junctions of one device share a length, so the split is even.
    pub fn junction_capacitances(&self) -> (f64, f64) {
        let c_j = self.total_capacitance() - SHUNT_CAPACITANCE_FF;
        let (l, r) = (self.junction_length_um, self.junction_length_um);
        (c_j * l / (l + r), c_j * r / (l + r))
    }
}
