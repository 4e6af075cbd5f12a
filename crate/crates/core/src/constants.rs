//! Physical constants (SI, CODATA 2018) and mass display units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact in the 2019 SI).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;
/// Electron rest mass, kg. One "electron mass unit" (EMU) for display.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Unified atomic mass unit (dalton), kg.
pub const DALTON: f64 = 1.660_539_066_60e-27;

/// Bundle of the constants above, for callers that want to carry them as a value
/// (e.g. to record them in run metadata).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub electron_mass_unit: f64,
    pub dalton: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        k_b: K_B,
        c: C,
        electron_mass_unit: ELECTRON_MASS,
        dalton: DALTON,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// Unit used when presenting a mass to humans. Everything is computed in kg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassUnit {
    Kg,
    Emu,
    Da,
}

impl MassUnit {
    pub fn kilograms(self) -> f64 {
        match self {
            MassUnit::Kg => 1.0,
            MassUnit::Emu => ELECTRON_MASS,
            MassUnit::Da => DALTON,
        }
    }

    pub fn from_kg(self, mass_kg: f64) -> f64 {
        mass_kg / self.kilograms()
    }

    pub fn label(self) -> &'static str {
        match self {
            MassUnit::Kg => "kg",
            MassUnit::Emu => "EMU",
            MassUnit::Da => "Da",
        }
    }
}
