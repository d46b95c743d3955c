//! Quantized mode set of an undriven lattice (`t ≤ 0`, `E = E0`).
//!
//! Nodes are indexed `n = 1..=N` on a ring (`n + N ≡ n`). Mode indices run
//! over `±1..=±N/2`; the two band-edge indices `±N/2` describe the same
//! lattice wave (`e^{iπn} = e^{-iπn}`), so identities below hold against
//! the lattice Kronecker delta `δ_{(i−j) mod N}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::constants::HBAR;
use crate::lattice::{CircuitFamily, CircuitSpec, LatticeError};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantizationError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("mode functions at t = {0} s > 0 depend on the drive; use the dynamics module")]
    DrivenEpoch(f64),
    #[error("{what} has length {got}, expected {expected}")]
    Shape {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("occupation of mode {j} is negative ({n})")]
    NegativeOccupation { j: i64, n: i64 },
}

/// Derived per-mode quantities at `E0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub j: i64,
    /// rad/m
    pub k: f64,
    /// rad/s
    pub omega0: f64,
    pub chi: f64,
    /// J
    pub epsilon: f64,
    /// Mode-function amplitude `√(ħ/(2 C N ω0))`, Wb.
    pub amp_norm: f64,
    /// Projection prefactor `√(ω0 C/(2ħN))`, 1/Wb.
    pub zeta: f64,
    /// Capacitance entering `amp_norm` and `zeta`, F.
    pub capacitance: f64,
}

/// Complex flux and conjugate momentum on every node.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Wb
    pub flux: Vec<Complex64>,
    /// C (charge-like)
    pub momentum: Vec<Complex64>,
}

impl FieldState {
    pub fn zeros(cells: usize) -> Self {
        Self {
            flux: vec![Complex64::new(0.0, 0.0); cells],
            momentum: vec![Complex64::new(0.0, 0.0); cells],
        }
    }
}

/// A linear functional `Σ_n (u_n Φ_n + v_n P_n)` of the node variables.
#[derive(Debug, Clone)]
struct NodeFunctional {
    flux: Vec<Complex64>,
    momentum: Vec<Complex64>,
}

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }
}

/// Immutable table of the `N` modes of a lattice.
#[derive(Debug, Clone)]
pub struct ModeSet {
    spec: CircuitSpec,
    modes: Vec<Mode>,
    /// Multiplies χ inside the amplitude extraction only. Negative-control hook.
    chi_scale: f64,
}

impl ModeSet {
    pub fn new(spec: &CircuitSpec) -> Result<Self, QuantizationError> {
        let n = spec.cells() as f64;
        let modes = spec
            .mode_indices()
            .map(|j| {
                let omega0 = spec.omega0(j)?;
                let capacitance = spec.mode_capacitance(j)?;
                Ok(Mode {
                    j,
                    k: spec.wave_vector(j)?,
                    omega0,
                    chi: spec.chi(j)?,
                    epsilon: spec.epsilon0(j)?,
                    amp_norm: (HBAR / (2.0 * capacitance * n * omega0)).sqrt(),
                    zeta: (omega0 * capacitance / (2.0 * HBAR * n)).sqrt(),
                    capacitance,
                })
            })
            .collect::<Result<Vec<_>, LatticeError>>()?;
        Ok(Self {
            spec: spec.clone(),
            modes,
            chi_scale: 1.0,
        })
    }

    /// Copy whose amplitude extraction uses `factor·χ` instead of `χ`.
    ///
    /// Only meant for negative-control checks: the commutator and round-trip
    /// identities must fail for any `factor != 1`.
    pub fn with_perturbed_chi(&self, factor: f64) -> Self {
        Self {
            chi_scale: factor,
            ..self.clone()
        }
    }

    pub fn spec(&self) -> &CircuitSpec {
        &self.spec
    }

    pub fn cells(&self) -> usize {
        self.spec.cells()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Position of mode `j` in [`Self::modes`].
    pub fn position(&self, j: i64) -> Result<usize, QuantizationError> {
        self.spec.check_mode(j)?;
        let half = self.spec.half();
        Ok(if j < 0 { (j + half) as usize } else { (j + half - 1) as usize })
    }

    pub fn mode(&self, j: i64) -> Result<&Mode, QuantizationError> {
        Ok(&self.modes[self.position(j)?])
    }

    /// Whether `i` and `j` label the same lattice wave.
    pub fn same_lattice_mode(&self, i: i64, j: i64) -> bool {
        (i - j).rem_euclid(self.cells() as i64) == 0
    }

    fn phase(&self, mode: &Mode, n: usize, t: f64) -> Complex64 {
        let kdx = 2.0 * PI * mode.j as f64 / self.cells() as f64;
        Complex64::from_polar(1.0, kdx * n as f64 - mode.omega0 * t)
    }

    /// `φ_j(n, t) = √(ħ/(2CNω0)) e^{i(k n Δx − ω0 t)}` for `t ≤ 0`.
    pub fn mode_function(&self, j: i64, n: usize, t: f64) -> Result<Complex64, QuantizationError> {
        if t > 0.0 {
            return Err(QuantizationError::DrivenEpoch(t));
        }
        self.check_node(n)?;
        let m = self.mode(j)?;
        Ok(m.amp_norm * self.phase(m, n, t))
    }

    fn check_node(&self, n: usize) -> Result<(), QuantizationError> {
        if n == 0 || n > self.cells() {
            return Err(QuantizationError::Shape {
                what: "node index",
                got: n,
                expected: self.cells(),
            });
        }
        Ok(())
    }

    /// Symplectic product `−(iC/ħ) Σ_n [φ_i ∂_tφ_j* − ∂_tφ_i φ_j*]` by explicit summation.
    ///
    /// Equals 1 when `i` and `j` are the same lattice mode and 0 otherwise.
    pub fn normalization_check(&self, i: i64, j: i64) -> Result<Complex64, QuantizationError> {
        let t = 0.0;
        let cells = self.cells();
        let (mi, mj) = (self.mode(i)?, self.mode(j)?);
        let phi_i: Vec<Complex64> = (1..=cells).map(|n| mi.amp_norm * self.phase(mi, n, t)).collect();
        let phi_j: Vec<Complex64> = (1..=cells).map(|n| mj.amp_norm * self.phase(mj, n, t)).collect();
        let dphi_i: Vec<Complex64> = phi_i.iter().map(|p| -I * mi.omega0 * p).collect();
        let dphi_j: Vec<Complex64> = phi_j.iter().map(|p| -I * mj.omega0 * p).collect();
        let w_dphi_j = self.apply_norm_weight(&dphi_j);
        let w_dphi_i = self.apply_norm_weight(&dphi_i);
        let sum: Complex64 = (0..cells)
            .map(|n| phi_i[n] * w_dphi_j[n].conj() - w_dphi_i[n] * phi_j[n].conj())
            .sum();
        Ok(-I / HBAR * sum)
    }

    /// Nodewise weight of the symplectic product: `C` for every family
    /// except exact RHTL2, whose series junction capacitance couples neighbours.
    fn apply_norm_weight(&self, x: &[Complex64]) -> Vec<Complex64> {
        let c = self.spec.capacitance();
        match self.spec.family() {
            CircuitFamily::Rhtl2 if !self.spec.rhtl2_approx() => {
                let cj = self.spec.junction_capacitance();
                laplacian(x)
                    .into_iter()
                    .zip(x)
                    .map(|(lap, v)| c * v + cj * lap)
                    .collect()
            }
            _ => x.iter().map(|v| c * v).collect(),
        }
    }

    /// Conjugate momenta `P_n = ∂L/∂Φ̇_n` for node flux rates `flux_rate`.
    pub fn momentum_from_rates(&self, flux_rate: &[Complex64]) -> Result<Vec<Complex64>, QuantizationError> {
        self.check_len("flux_rate", flux_rate.len())?;
        let c = self.spec.capacitance();
        let cj = self.spec.junction_capacitance();
        let lap = laplacian(flux_rate);
        let out = flux_rate
            .iter()
            .zip(lap)
            .map(|(&v, lap)| match self.spec.family() {
                CircuitFamily::Lhtl1 => c * lap + cj * v,
                CircuitFamily::Lhtl2 => c * lap,
                CircuitFamily::Rhtl1 => c * v,
                CircuitFamily::Rhtl2 if self.spec.rhtl2_approx() => c * v,
                CircuitFamily::Rhtl2 => c * v + cj * lap,
            })
            .collect();
        Ok(out)
    }

    fn check_len(&self, what: &'static str, got: usize) -> Result<(), QuantizationError> {
        if got != self.cells() {
            return Err(QuantizationError::Shape {
                what,
                got,
                expected: self.cells(),
            });
        }
        Ok(())
    }

    fn check_amplitudes(&self, amplitudes: &[Complex64]) -> Result<(), QuantizationError> {
        if amplitudes.len() != self.len() {
            return Err(QuantizationError::Shape {
                what: "amplitude vector",
                got: amplitudes.len(),
                expected: self.len(),
            });
        }
        Ok(())
    }

    /// Node flux and flux rate of the classical field `Σ_j [φ_j a_j + φ_j* a_j*]`.
    ///
    /// With `real = false` only the positive-frequency part `Σ_j φ_j a_j` is kept.
    pub fn synthesize(
        &self,
        amplitudes: &[Complex64],
        t: f64,
        real: bool,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>), QuantizationError> {
        self.check_amplitudes(amplitudes)?;
        let cells = self.cells();
        let mut flux = vec![Complex64::new(0.0, 0.0); cells];
        let mut rate = vec![Complex64::new(0.0, 0.0); cells];
        for (mode, &a) in self.modes.iter().zip(amplitudes) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for n in 1..=cells {
                let phi = mode.amp_norm * self.phase(mode, n, t) * a;
                let dphi = -I * mode.omega0 * phi;
                flux[n - 1] += phi;
                rate[n - 1] += dphi;
                if real {
                    flux[n - 1] += phi.conj();
                    rate[n - 1] += dphi.conj();
                }
            }
        }
        Ok((flux, rate))
    }

    /// Builds a [`FieldState`] from mode amplitudes (see [`Self::synthesize`]).
    pub fn embed(&self, amplitudes: &[Complex64], t: f64, real: bool) -> Result<FieldState, QuantizationError> {
        let (flux, rate) = self.synthesize(amplitudes, t, real)?;
        let momentum = self.momentum_from_rates(&rate)?;
        Ok(FieldState { flux, momentum })
    }

    fn extraction_functional(&self, h: i64, t: f64) -> Result<NodeFunctional, QuantizationError> {
        let m = self.mode(h)?;
        let chi = m.chi * self.chi_scale;
        let weight = I / (m.capacitance * chi * m.omega0);
        let cells = self.cells();
        let mut flux = Vec::with_capacity(cells);
        let mut momentum = Vec::with_capacity(cells);
        for n in 1..=cells {
            let e = m.zeta * self.phase(m, n, t).conj();
            flux.push(e);
            momentum.push(e * weight);
        }
        Ok(NodeFunctional { flux, momentum })
    }

    /// Classical amplitude `a_h = ζ_h Σ_n e^{−i(k_h nΔx − ω_h t)} [Φ_n + i P_n/(C χ_h ω_h)]`.
    pub fn extract_amplitude(&self, state: &FieldState, h: i64, t: f64) -> Result<Complex64, QuantizationError> {
        self.check_len("flux", state.flux.len())?;
        self.check_len("momentum", state.momentum.len())?;
        let f = self.extraction_functional(h, t)?;
        Ok(f.flux
            .iter()
            .zip(&state.flux)
            .chain(f.momentum.iter().zip(&state.momentum))
            .map(|(c, x)| c * x)
            .sum())
    }

    /// Amplitudes of every mode, in [`Self::modes`] order.
    pub fn extract_all(&self, state: &FieldState, t: f64) -> Result<Vec<Complex64>, QuantizationError> {
        self.modes
            .iter()
            .map(|m| self.extract_amplitude(state, m.j, t))
            .collect()
    }

    /// `[â_j, â_h†]` from the canonical node commutators, as an explicit double sum over nodes.
    pub fn commutator(&self, j: i64, h: i64) -> Result<Complex64, QuantizationError> {
        let a = self.extraction_functional(j, 0.0)?;
        let b = self.extraction_functional(h, 0.0)?;
        let cells = self.cells();
        let mut sum = Complex64::new(0.0, 0.0);
        // â_h† = Σ (ū Φ + v̄ P); [Φ_n, P_m] = iħδ_nm, [P_n, Φ_m] = −iħδ_nm, [Φ, Φ] = [P, P] = 0
        for n in 0..cells {
            for m in 0..cells {
                let phi_p = canonical_flux_momentum(n, m);
                let p_phi = -phi_p;
                sum += a.flux[n] * b.momentum[m].conj() * phi_p + a.momentum[n] * b.flux[m].conj() * p_phi;
            }
        }
        Ok(sum)
    }

    /// Full `N×N` commutator matrix in [`Self::modes`] order.
    pub fn commutator_matrix(&self) -> Result<ComplexMatrix, QuantizationError> {
        let dim = self.len();
        let mut data = Vec::with_capacity(dim * dim);
        for mj in &self.modes {
            for mh in &self.modes {
                data.push(self.commutator(mj.j, mh.j)?);
            }
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Full `N×N` normalization matrix in [`Self::modes`] order.
    pub fn normalization_matrix(&self) -> Result<ComplexMatrix, QuantizationError> {
        let dim = self.len();
        let mut data = Vec::with_capacity(dim * dim);
        for mi in &self.modes {
            for mj in &self.modes {
                data.push(self.normalization_check(mi.j, mj.j)?);
            }
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// `Σ_j ħω0_j (χ_j n_j + 1/2)` for occupations given in [`Self::modes`] order.
    pub fn hamiltonian_spectrum(&self, occupation: &[i64]) -> Result<f64, QuantizationError> {
        if occupation.len() != self.len() {
            return Err(QuantizationError::Shape {
                what: "occupation vector",
                got: occupation.len(),
                expected: self.len(),
            });
        }
        self.modes
            .iter()
            .zip(occupation)
            .map(|(m, &n)| {
                if n < 0 {
                    Err(QuantizationError::NegativeOccupation { j: m.j, n })
                } else {
                    Ok(HBAR * m.omega0 * (m.chi * n as f64 + 0.5))
                }
            })
            .sum()
    }

    /// Classical energy `Σ_n [Φ̇·∂L/∂Φ̇] − L` of a real node configuration at `E0`.
    pub fn nodal_energy(&self, flux: &[f64], flux_rate: &[f64]) -> Result<f64, QuantizationError> {
        self.check_len("flux", flux.len())?;
        self.check_len("flux_rate", flux_rate.len())?;
        let cells = self.cells();
        let c = self.spec.capacitance();
        let cj = self.spec.junction_capacitance();
        let l = self.spec.inductance();
        let et = self.spec.tilde_e0();
        let next = |n: usize| (n + 1) % cells;
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for n in 0..cells {
            let dr = flux_rate[next(n)] - flux_rate[n];
            let df = flux[next(n)] - flux[n];
            let (r, f) = (flux_rate[n], flux[n]);
            match self.spec.family() {
                CircuitFamily::Lhtl1 => {
                    kinetic += c * dr * dr + cj * r * r;
                    potential += et * f * f;
                }
                CircuitFamily::Lhtl2 => {
                    kinetic += c * dr * dr;
                    potential += f * f / l + et * df * df;
                }
                CircuitFamily::Rhtl1 => {
                    kinetic += c * r * r;
                    potential += df * df / l + et * f * f;
                }
                CircuitFamily::Rhtl2 => {
                    kinetic += c * r * r;
                    if !self.spec.rhtl2_approx() {
                        kinetic += cj * dr * dr;
                    }
                    potential += et * df * df;
                }
            }
        }
        Ok(0.5 * (kinetic + potential))
    }

    /// `Σ_j ħ ω0_j χ_j |a_j|²`, the normal-ordered energy of classical amplitudes.
    pub fn mode_energy_sum(&self, amplitudes: &[Complex64]) -> Result<f64, QuantizationError> {
        self.check_amplitudes(amplitudes)?;
        Ok(self
            .modes
            .iter()
            .zip(amplitudes)
            .map(|(m, a)| HBAR * m.omega0 * m.chi * a.norm_sqr())
            .sum())
    }
}

/// `[Φ_n, P_m] / 1` in units where the canonical commutator is `iħδ_nm`.
fn canonical_flux_momentum(n: usize, m: usize) -> Complex64 {
    if n == m {
        I * HBAR
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `2x_n − x_{n+1} − x_{n−1}` on the ring.
fn laplacian(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|i| 2.0 * x[i] - x[(i + 1) % n] - x[(i + n - 1) % n])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(f: CircuitFamily, cells: usize) -> ModeSet {
        let spec = CircuitSpec::reference(f).with_cells(cells).unwrap();
        ModeSet::new(&spec).unwrap()
    }

    #[test]
    fn mode_count_and_order() {
        let m = small(CircuitFamily::Lhtl1, 8);
        let js: Vec<i64> = m.modes().iter().map(|m| m.j).collect();
        assert_eq!(js, vec![-4, -3, -2, -1, 1, 2, 3, 4]);
        for j in js {
            assert_eq!(m.modes()[m.position(j).unwrap()].j, j);
        }
    }

    #[test]
    fn amp_norm_times_zeta() {
        for f in CircuitFamily::ALL {
            let m = small(f, 16);
            for mode in m.modes() {
                assert_relative_eq!(mode.amp_norm * mode.zeta, 1.0 / 32.0, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn mode_function_examples() {
        let m = small(CircuitFamily::Lhtl1, 16);
        let mode = *m.mode(3).unwrap();
        for n in 1..=16 {
            for t in [0.0, -1e-12, -3.3e-11] {
                let v = m.mode_function(3, n, t).unwrap();
                assert_relative_eq!(v.norm(), mode.amp_norm, max_relative = 1e-14);
            }
        }
        // band edge alternates sign
        let edge = m.mode(8).unwrap().amp_norm;
        for n in 1..=16 {
            let v = m.mode_function(8, n, 0.0).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v.re - sign * edge).abs() < 1e-12 * edge);
            assert!(v.im.abs() < 1e-12 * edge);
        }
        assert!(matches!(m.mode_function(1, 1, 1e-15), Err(QuantizationError::DrivenEpoch(_))));
        assert!(m.mode_function(1, 0, 0.0).is_err());
        assert!(m.mode_function(1, 17, 0.0).is_err());
    }

    #[test]
    fn normalization_examples() {
        let m = small(CircuitFamily::Lhtl2, 32);
        let diag = m.normalization_check(5, 5).unwrap();
        assert!((diag - 1.0).norm() < 1e-12);
        assert!(m.normalization_check(5, -5).unwrap().norm() < 1e-12);
        assert!(m.normalization_check(3, 11).unwrap().norm() < 1e-12);
        // band-edge alias
        assert!((m.normalization_check(16, -16).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn zero_state_extracts_zero() {
        let m = small(CircuitFamily::Rhtl1, 8);
        let z = FieldState::zeros(8);
        for mode in m.modes() {
            assert_eq!(m.extract_amplitude(&z, mode.j, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        }
        let short = FieldState::zeros(6);
        assert!(matches!(m.extract_amplitude(&short, 1, 0.0), Err(QuantizationError::Shape { .. })));
    }

    #[test]
    fn single_mode_round_trip() {
        for f in CircuitFamily::ALL {
            let m = small(f, 12);
            let mut amps = vec![Complex64::new(0.0, 0.0); m.len()];
            amps[m.position(2).unwrap()] = Complex64::new(1.0, 0.0);
            for real in [false, true] {
                let state = m.embed(&amps, -2e-12, real).unwrap();
                let back = m.extract_all(&state, -2e-12).unwrap();
                for (a, b) in amps.iter().zip(&back) {
                    assert!((a - b).norm() < 1e-12, "{f}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn two_mode_superposition() {
        let m = small(CircuitFamily::Lhtl1, 20);
        let mut amps = vec![Complex64::new(0.0, 0.0); m.len()];
        amps[m.position(3).unwrap()] = Complex64::new(0.3, -1.1);
        amps[m.position(-7).unwrap()] = Complex64::new(-2.0, 0.5);
        let state = m.embed(&amps, 0.0, true).unwrap();
        assert!((m.extract_amplitude(&state, 3, 0.0).unwrap() - amps[m.position(3).unwrap()]).norm() < 1e-12);
        assert!((m.extract_amplitude(&state, -7, 0.0).unwrap() - amps[m.position(-7).unwrap()]).norm() < 1e-12);
        assert!(m.extract_amplitude(&state, 7, 0.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn commutator_diagonal_is_inverse_chi() {
        for f in CircuitFamily::ALL {
            let m = small(f, 10);
            for mode in m.modes() {
                let c = m.commutator(mode.j, mode.j).unwrap();
                assert_relative_eq!(c.re, 1.0 / mode.chi, max_relative = 1e-12);
                assert!(c.im.abs() < 1e-12);
            }
            assert!(m.commutator(1, 2).unwrap().norm() < 1e-12);
            assert!(m.commutator(3, -3).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn perturbed_chi_breaks_commutator() {
        let m = small(CircuitFamily::Lhtl1, 10).with_perturbed_chi(1.1);
        let mode = *m.mode(2).unwrap();
        let c = m.commutator(2, 2).unwrap();
        assert!((c.re - 1.0 / mode.chi).abs() > 1e-3);
    }

    #[test]
    fn hamiltonian_examples() {
        let m = small(CircuitFamily::Lhtl2, 8);
        let vac = vec![0; m.len()];
        let zero_point: f64 = m.modes().iter().map(|m| 0.5 * HBAR * m.omega0).sum();
        assert_relative_eq!(m.hamiltonian_spectrum(&vac).unwrap(), zero_point, max_relative = 1e-14);
        let mut one = vac.clone();
        let p = m.position(3).unwrap();
        one[p] = 1;
        let gap = m.hamiltonian_spectrum(&one).unwrap() - zero_point;
        assert_relative_eq!(gap, m.modes()[p].epsilon, max_relative = 1e-9);
        one[p] = -1;
        assert!(matches!(
            m.hamiltonian_spectrum(&one),
            Err(QuantizationError::NegativeOccupation { j: 3, n: -1 })
        ));
        assert!(m.hamiltonian_spectrum(&[0, 0]).is_err());
    }

    #[test]
    fn undriven_amplitudes_rotate_at_omega() {
        // Heisenberg picture: a_j(t) = a_j(0) e^{-iω_j t}, not e^{-iε_j t/ħ}
        let m = small(CircuitFamily::Lhtl1, 12);
        let mut amps = vec![Complex64::new(0.0, 0.0); m.len()];
        let p = m.position(2).unwrap();
        amps[p] = Complex64::new(1.0, 0.0);
        let t = -1e-12;
        let (flux, rate) = m.synthesize(&amps, t, true).unwrap();
        let state = FieldState {
            momentum: m.momentum_from_rates(&rate).unwrap(),
            flux,
        };
        // project with the static (t = 0) functional: picks up e^{-iωt}
        let a = m.extract_amplitude(&state, 2, 0.0).unwrap();
        let expected = Complex64::from_polar(1.0, -m.modes()[p].omega0 * t);
        assert!((a - expected).norm() < 1e-12);
    }
}
