//! Circuit families and their closed-form static spectra.
//!
//! All four lattices are rings of `N` cells driven through the Josephson
//! energy `E` of their SQUIDs. Every spectral quantity depends on the wave
//! vector only through `k_j Δx = 2πj/N`, so results do not depend on the
//! cell length.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{E_CHARGE, HBAR, PHI0};

/// Phase-regime margin below which `E0 ≫ (2e)²/2C_J` is reported as violated.
pub const PHASE_REGIME_MIN_RATIO: f64 = 100.0;

/// Margin below which `4C ≫ C_J` (LHTL1 infrared limit) is reported as violated.
pub const IR_VALIDITY_MIN_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("cell count N = {0} must be even and at least 4")]
    BadCellCount(usize),
    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("mode index {j} outside the Brillouin zone: valid range is ±1..=±{half}")]
    ModeOutOfRange { j: i64, half: i64 },
    #[error("Josephson energy must be positive, got {0} J")]
    NonPositiveEnergy(f64),
    #[error("{operation} is only defined for {supported}, not {family}")]
    Unsupported {
        operation: &'static str,
        supported: &'static str,
        family: CircuitFamily,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CircuitFamily {
    /// Left-handed line, SQUIDs in parallel.
    #[serde(rename = "LHTL1")]
    Lhtl1,
    /// Left-handed line, SQUIDs in series.
    #[serde(rename = "LHTL2")]
    Lhtl2,
    /// Right-handed line, SQUIDs replacing the capacitors.
    #[serde(rename = "RHTL1")]
    Rhtl1,
    /// Right-handed line, SQUIDs replacing the inductors.
    #[serde(rename = "RHTL2")]
    Rhtl2,
}

impl CircuitFamily {
    pub const ALL: [CircuitFamily; 4] = [
        CircuitFamily::Lhtl1,
        CircuitFamily::Lhtl2,
        CircuitFamily::Rhtl1,
        CircuitFamily::Rhtl2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CircuitFamily::Lhtl1 => "LHTL1",
            CircuitFamily::Lhtl2 => "LHTL2",
            CircuitFamily::Rhtl1 => "RHTL1",
            CircuitFamily::Rhtl2 => "RHTL2",
        }
    }

    pub fn is_left_handed(self) -> bool {
        matches!(self, CircuitFamily::Lhtl1 | CircuitFamily::Lhtl2)
    }

    /// Whether the modulated Josephson term scales the whole `ω²` or only adds a mass.
    pub fn drive_class(self) -> DriveClass {
        match self {
            CircuitFamily::Lhtl1 | CircuitFamily::Rhtl2 => DriveClass::Massless,
            CircuitFamily::Lhtl2 | CircuitFamily::Rhtl1 => DriveClass::Massive,
        }
    }
}

impl fmt::Display for CircuitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown circuit family '{0}' (expected LHTL1, LHTL2, RHTL1 or RHTL2)")]
pub struct UnknownFamily(pub String);

impl FromStr for CircuitFamily {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LHTL1" => Ok(CircuitFamily::Lhtl1),
            "LHTL2" => Ok(CircuitFamily::Lhtl2),
            "RHTL1" => Ok(CircuitFamily::Rhtl1),
            "RHTL2" => Ok(CircuitFamily::Rhtl2),
            _ => Err(UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriveClass {
    Massless,
    Massive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpecWarning {
    /// `E0 / ((2e)²/2C_J)` is below [`PHASE_REGIME_MIN_RATIO`].
    OutsidePhaseRegime { ratio: f64 },
    /// LHTL1 only: `4C / C_J` is below [`IR_VALIDITY_MIN_RATIO`].
    InfraredApproximationDegraded { ratio: f64 },
}

impl fmt::Display for SpecWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecWarning::OutsidePhaseRegime { ratio } => write!(
                f,
                "SQUIDs not deep in the phase regime: E0/(2e)^2/2C_J = {ratio:.3}"
            ),
            SpecWarning::InfraredApproximationDegraded { ratio } => write!(
                f,
                "4C/C_J = {ratio:.3}: the approximate infrared limit is unreliable"
            ),
        }
    }
}

/// Exact and approximate infrared (band-edge) frequency of LHTL1, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfraredLimit {
    pub exact: f64,
    pub approx: f64,
}

/// Physical description of one lattice. Immutable once built.
///
/// For LHTL2 and RHTL1 the SQUID capacitance is the only capacitance in the
/// cell; it is identified with `capacitance` and `junction_capacitance` is
/// not used by their dispersion relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    family: CircuitFamily,
    cells: usize,
    /// m
    delta_x: f64,
    /// F
    capacitance: f64,
    /// F
    junction_capacitance: f64,
    /// H
    inductance: f64,
    /// A
    critical_current: f64,
    /// RHTL2 only: use `2 sin(kΔx/2)·√(Ẽ/C)`, i.e. drop `4C_J sin²` against `C`.
    rhtl2_approx: bool,
}

fn positive(name: &'static str, value: f64) -> Result<f64, LatticeError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(LatticeError::NonPositive { name, value })
    }
}

impl CircuitSpec {
    pub fn new(
        family: CircuitFamily,
        cells: usize,
        delta_x: f64,
        capacitance: f64,
        junction_capacitance: f64,
        inductance: f64,
        critical_current: f64,
    ) -> Result<Self, LatticeError> {
        if cells < 4 || !cells.is_multiple_of(2) {
            return Err(LatticeError::BadCellCount(cells));
        }
        Ok(Self {
            family,
            cells,
            delta_x: positive("delta_x", delta_x)?,
            capacitance: positive("C", capacitance)?,
            junction_capacitance: positive("C_J", junction_capacitance)?,
            inductance: positive("L", inductance)?,
            critical_current: positive("I_c", critical_current)?,
            rhtl2_approx: false,
        })
    }

    /// Lattice with the reference element values C = 0.4 pF, L = 60 pH,
    /// C_J = 0.02 pF, I_c = 1.25 μA, N = 200, Δx = 1 m.
    pub fn reference(family: CircuitFamily) -> Self {
        Self::new(family, 200, 1.0, 0.4e-12, 0.02e-12, 60e-12, 1.25e-6)
            .expect("reference parameters are valid")
    }

    pub fn with_family(&self, family: CircuitFamily) -> Self {
        Self {
            family,
            ..self.clone()
        }
    }

    pub fn with_cells(&self, cells: usize) -> Result<Self, LatticeError> {
        Self::new(
            self.family,
            cells,
            self.delta_x,
            self.capacitance,
            self.junction_capacitance,
            self.inductance,
            self.critical_current,
        )
        .map(|s| s.with_rhtl2_approx(self.rhtl2_approx))
    }

    pub fn with_critical_current(&self, critical_current: f64) -> Result<Self, LatticeError> {
        Ok(Self {
            critical_current: positive("I_c", critical_current)?,
            ..self.clone()
        })
    }

    pub fn with_rhtl2_approx(mut self, approx: bool) -> Self {
        self.rhtl2_approx = approx;
        self
    }

    pub fn family(&self) -> CircuitFamily {
        self.family
    }
    pub fn cells(&self) -> usize {
        self.cells
    }
    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }
    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }
    pub fn junction_capacitance(&self) -> f64 {
        self.junction_capacitance
    }
    pub fn inductance(&self) -> f64 {
        self.inductance
    }
    pub fn critical_current(&self) -> f64 {
        self.critical_current
    }
    pub fn rhtl2_approx(&self) -> bool {
        self.rhtl2_approx
    }

    pub fn drive_class(&self) -> DriveClass {
        self.family.drive_class()
    }

    pub fn half(&self) -> i64 {
        (self.cells / 2) as i64
    }

    /// Mode indices of the positive branch, `1..=N/2`.
    pub fn positive_modes(&self) -> impl Iterator<Item = i64> {
        1..=self.half()
    }

    /// All mode indices `−N/2..=−1, 1..=N/2` in ascending order.
    pub fn mode_indices(&self) -> impl Iterator<Item = i64> {
        let h = self.half();
        (-h..=h).filter(|&j| j != 0)
    }

    pub fn check_mode(&self, j: i64) -> Result<(), LatticeError> {
        let half = self.half();
        if j == 0 || j.abs() > half {
            Err(LatticeError::ModeOutOfRange { j, half })
        } else {
            Ok(())
        }
    }

    /// Capacitance shunting each SQUID, used by the phase-regime check.
    fn squid_capacitance(&self) -> f64 {
        match self.family {
            CircuitFamily::Lhtl1 | CircuitFamily::Rhtl2 => self.junction_capacitance,
            CircuitFamily::Lhtl2 | CircuitFamily::Rhtl1 => self.capacitance,
        }
    }

    pub fn warnings(&self) -> Vec<SpecWarning> {
        let mut out = Vec::new();
        let charging = (2.0 * E_CHARGE).powi(2) / (2.0 * self.squid_capacitance());
        let ratio = self.e0() / charging;
        if ratio < PHASE_REGIME_MIN_RATIO {
            out.push(SpecWarning::OutsidePhaseRegime { ratio });
        }
        if self.family == CircuitFamily::Lhtl1 {
            let ratio = 4.0 * self.capacitance / self.junction_capacitance;
            if ratio < IR_VALIDITY_MIN_RATIO {
                out.push(SpecWarning::InfraredApproximationDegraded { ratio });
            }
        }
        out
    }

    /// Unmodulated Josephson energy `E0 = I_c φ0`, J.
    pub fn e0(&self) -> f64 {
        self.critical_current * PHI0
    }

    /// `Ẽ = (2π/φ0)² E`, 1/H.
    pub fn tilde_e(&self, energy: f64) -> Result<f64, LatticeError> {
        if !(energy > 0.0) {
            return Err(LatticeError::NonPositiveEnergy(energy));
        }
        Ok(tilde(energy))
    }

    pub fn tilde_e0(&self) -> f64 {
        tilde(self.e0())
    }

    /// `k_j = 2πj/(NΔx)`, rad/m.
    pub fn wave_vector(&self, j: i64) -> Result<f64, LatticeError> {
        self.check_mode(j)?;
        Ok(2.0 * PI * j as f64 / (self.cells as f64 * self.delta_x))
    }

    /// `k_j Δx`, the dimensionless phase advance per cell.
    pub fn phase_advance(&self, j: i64) -> Result<f64, LatticeError> {
        self.check_mode(j)?;
        Ok(2.0 * PI * j as f64 / self.cells as f64)
    }

    /// `sin²(k_j Δx / 2)`.
    fn sin2_half(&self, j: i64) -> Result<f64, LatticeError> {
        let s = (self.phase_advance(j)? / 2.0).sin();
        Ok(s * s)
    }

    /// Dispersion relation at Josephson energy `energy`, rad/s. Even in `j`.
    pub fn dispersion(&self, j: i64, energy: f64) -> Result<f64, LatticeError> {
        self.check_mode(j)?;
        let et = self.tilde_e(energy)?;
        Ok(self.dispersion_at(self.phase_advance(j)?, et))
    }

    /// Dispersion at a continuous phase advance `θ = kΔx` and reduced energy `Ẽ`.
    ///
    /// Singular at `θ = 0` for LHTL2.
    pub fn dispersion_at(&self, theta: f64, tilde_e: f64) -> f64 {
        let (c, cj, l) = (self.capacitance, self.junction_capacitance, self.inductance);
        let s = (theta / 2.0).sin();
        let s2 = s * s;
        match self.family {
            CircuitFamily::Lhtl1 => (tilde_e / (4.0 * c * s2 + cj)).sqrt(),
            CircuitFamily::Lhtl2 => (1.0 / (4.0 * c * l * s2) + tilde_e / c).sqrt(),
            CircuitFamily::Rhtl1 => (4.0 * s2 / (l * c) + tilde_e / c).sqrt(),
            CircuitFamily::Rhtl2 if self.rhtl2_approx => 2.0 * s.abs() * (tilde_e / c).sqrt(),
            CircuitFamily::Rhtl2 => 2.0 * s.abs() * (tilde_e / (c + 4.0 * cj * s2)).sqrt(),
        }
    }

    /// `ω0_j`, the dispersion at `E0`.
    pub fn omega0(&self, j: i64) -> Result<f64, LatticeError> {
        self.dispersion(j, self.e0())
    }

    /// Coefficients `(a, b)` with `ω_j² = a + b·Ẽ`, exact for every family.
    ///
    /// `a = 0` exactly for massless families.
    pub fn stiffness_coefficients(&self, j: i64) -> Result<(f64, f64), LatticeError> {
        let s2 = self.sin2_half(j)?;
        let (c, cj, l) = (self.capacitance, self.junction_capacitance, self.inductance);
        Ok(match self.family {
            CircuitFamily::Lhtl1 => (0.0, 1.0 / (4.0 * c * s2 + cj)),
            CircuitFamily::Lhtl2 => (1.0 / (4.0 * c * l * s2), 1.0 / c),
            CircuitFamily::Rhtl1 => (4.0 * s2 / (l * c), 1.0 / c),
            CircuitFamily::Rhtl2 if self.rhtl2_approx => (0.0, 4.0 * s2 / c),
            CircuitFamily::Rhtl2 => (0.0, 4.0 * s2 / (c + 4.0 * cj * s2)),
        })
    }

    /// Analytic group velocity `∂ω/∂k`, m/s.
    ///
    /// Vanishes at the band edge `j = ±N/2` for every family.
    pub fn group_velocity(&self, j: i64, energy: f64) -> Result<f64, LatticeError> {
        let omega = self.dispersion(j, energy)?;
        let et = self.tilde_e(energy)?;
        let theta = self.phase_advance(j)?;
        let dx = self.delta_x;
        let (c, cj, l) = (self.capacitance, self.junction_capacitance, self.inductance);
        let s2 = (theta / 2.0).sin().powi(2);
        // d(sin²(θ/2))/dk = (Δx/2) sin θ
        let ds2_dk = 0.5 * dx * theta.sin();
        Ok(match self.family {
            CircuitFamily::Lhtl1 => -omega * 2.0 * c * ds2_dk / (4.0 * c * s2 + cj),
            CircuitFamily::Lhtl2 => -ds2_dk / (8.0 * c * l * s2 * s2 * omega),
            CircuitFamily::Rhtl1 => 2.0 * ds2_dk / (l * c * omega),
            CircuitFamily::Rhtl2 if self.rhtl2_approx => {
                (et / c).sqrt() * dx * (theta / 2.0).cos() * theta.signum()
            }
            CircuitFamily::Rhtl2 => {
                let denom = c + 4.0 * cj * s2;
                2.0 * et * c * ds2_dk / (denom * denom * omega)
            }
        })
    }

    /// Band-edge frequency of LHTL1: exact `√(Ẽ0/(4C+C_J))` and approximate `√(Ẽ0/4C)`.
    pub fn infrared_limit(&self) -> Result<InfraredLimit, LatticeError> {
        if self.family != CircuitFamily::Lhtl1 {
            return Err(LatticeError::Unsupported {
                operation: "infrared_limit",
                supported: "LHTL1",
                family: self.family,
            });
        }
        let et = self.tilde_e0();
        Ok(InfraredLimit {
            exact: (et / (4.0 * self.capacitance + self.junction_capacitance)).sqrt(),
            approx: (et / (4.0 * self.capacitance)).sqrt(),
        })
    }

    /// Commutator weight `χ_j`; identically 1 for right-handed lines.
    pub fn chi(&self, j: i64) -> Result<f64, LatticeError> {
        let s2 = self.sin2_half(j)?;
        Ok(match self.family {
            CircuitFamily::Lhtl1 => 4.0 * s2 + self.junction_capacitance / self.capacitance,
            CircuitFamily::Lhtl2 => 4.0 * s2,
            CircuitFamily::Rhtl1 | CircuitFamily::Rhtl2 => 1.0,
        })
    }

    /// Capacitance normalizing the mode functions of mode `j`, F.
    ///
    /// Equal to `C` except for exact RHTL2, whose kinetic term per mode is
    /// `C + 4C_J sin²(kΔx/2)`.
    pub fn mode_capacitance(&self, j: i64) -> Result<f64, LatticeError> {
        let s2 = self.sin2_half(j)?;
        Ok(match self.family {
            CircuitFamily::Rhtl2 if !self.rhtl2_approx => {
                self.capacitance + 4.0 * self.junction_capacitance * s2
            }
            _ => self.capacitance,
        })
    }

    /// `ε_j/ħ` at Josephson energy `energy`, rad/s.
    pub fn eigenfrequency(&self, j: i64, energy: f64) -> Result<f64, LatticeError> {
        let et = self.tilde_e(energy)?;
        let chi = self.chi(j)?;
        let c = self.capacitance;
        Ok(match self.family {
            CircuitFamily::Lhtl1 => (chi * et / c).sqrt(),
            CircuitFamily::Lhtl2 => (chi * et / c).sqrt() * (chi + 1.0 / (self.inductance * et)).sqrt(),
            CircuitFamily::Rhtl1 | CircuitFamily::Rhtl2 => self.dispersion(j, energy)?,
        })
    }

    /// Hamiltonian eigenenergy `ε_j` at Josephson energy `energy`, J.
    pub fn eigenenergy(&self, j: i64, energy: f64) -> Result<f64, LatticeError> {
        Ok(HBAR * self.eigenfrequency(j, energy)?)
    }

    pub fn epsilon0(&self, j: i64) -> Result<f64, LatticeError> {
        self.eigenenergy(j, self.e0())
    }

    /// `ε_j/ħ` at `E0`, rad/s.
    pub fn epsilon0_over_hbar(&self, j: i64) -> Result<f64, LatticeError> {
        self.eigenfrequency(j, self.e0())
    }
}

fn tilde(energy: f64) -> f64 {
    (2.0 * PI / PHI0).powi(2) * energy
}
