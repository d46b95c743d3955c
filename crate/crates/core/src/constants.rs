//! Physical constants used throughout the crate.
//!
//! The values are pinned in one table so every derived number in the
//! crate (and in its golden tests) is reproducible bit for bit.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Superconducting magnetic flux quantum `πħ/e`, Wb.
pub const PHI0: f64 = 2.067_833_848e-15;

/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Relative mismatch allowed between the tabulated `PHI0` and `π·HBAR/E_CHARGE`.
///
/// The table carries ten significant digits of the flux quantum, so the
/// two agree to a few parts in 1e10 rather than to machine precision.
pub const PHI0_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub phi0: f64,
    pub e_charge: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        phi0: PHI0,
        e_charge: E_CHARGE,
    };

    /// Relative deviation of `phi0` from `π·hbar/e_charge`.
    pub fn phi0_mismatch(&self) -> f64 {
        (PI * self.hbar / self.e_charge) / self.phi0 - 1.0
    }

    pub fn is_consistent(&self) -> bool {
        self.phi0_mismatch().abs() <= PHI0_CONSISTENCY_TOL
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}
