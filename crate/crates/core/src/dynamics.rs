//! Driven mode evolution and Bogoliubov coefficients.
//!
//! Modulating the Josephson energy as `E(t) = E0[1 + 4η sin Ωt]` turns each
//! Fourier mode into a parametric oscillator `Q̈ + ω_h²(t) Q = 0`. Two
//! independent routes give the output Bogoliubov coefficients:
//!
//! * [`multiscale_ab`]: closed-form first-order multiple-scale solution,
//!   valid on exact resonance `Ω = 2ω0_h`;
//! * [`integrate_mode`] + [`extract_ab_numeric`]: adaptive DOP853 integration
//!   of the exact oscillator equation.
//!
//! The integrator runs in dimensionless time `s = ω0_h t` on the rescaled
//! variable `q = √(2ω0_h)·Q`, so `q(0) = 1` and tolerances act on O(1) numbers.
//! Time is carried as a fifth state component: the DOP853 tableau of
//! `ode_solvers` 0.6 evaluates its last stage at `x` instead of `x + h`, which
//! only matters for right-hand sides that read `x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use ode_solvers::dop853::Dop853;
use ode_solvers::dop_shared::{IntegrationError, OutputType};
use ode_solvers::{SVector, System};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{CircuitSpec, DriveClass, LatticeError};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(Re q, Im q, Re q̇, Im q̇, s)`.
type State = SVector<f64, 5>;

/// Drive amplitude above which first-order multiscale results are reported as unreliable.
pub const ETA_WARN: f64 = 0.05;
/// Largest accepted drive amplitude.
pub const ETA_MAX: f64 = 0.1;

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("drive amplitude η = {0} outside [0, {ETA_MAX}]")]
    BadEta(f64),
    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("ramp window {window} s exceeds half the drive duration {t_final} s")]
    RampTooLong { window: f64, t_final: f64 },
    #[error("integration failed at t = {last_time:e} s: {reason}")]
    IntegrationFailed { last_time: f64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    /// Modulation switched on at `t = 0` and off at `t_f`.
    #[default]
    Hard,
    /// Envelope rising as `½(1 − cos(πt/w))` over `w` seconds and falling symmetrically before `t_f`.
    Cosine { window: f64 },
}

/// Parametric modulation of the Josephson energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    eta: f64,
    /// rad/s
    omega: f64,
    /// s
    t_final: f64,
    ramp: Ramp,
    resonance_tol: Option<f64>,
}

impl DriveSpec {
    pub fn new(eta: f64, omega: f64, t_final: f64) -> Result<Self, DynamicsError> {
        if !(0.0..=ETA_MAX).contains(&eta) {
            return Err(DynamicsError::BadEta(eta));
        }
        for (name, value) in [("Omega", omega), ("t_f", t_final)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(DynamicsError::NonPositive { name, value });
            }
        }
        Ok(Self {
            eta,
            omega,
            t_final,
            ramp: Ramp::Hard,
            resonance_tol: None,
        })
    }

    /// Drive at `Ω = 2ω0_h` lasting until the slow time `τ = η t_f` reaches `tau`.
    pub fn resonant(spec: &CircuitSpec, h: i64, eta: f64, tau: f64) -> Result<Self, DynamicsError> {
        if !(eta > 0.0) {
            return Err(DynamicsError::NonPositive { name: "eta", value: eta });
        }
        Self::new(eta, 2.0 * spec.omega0(h)?, tau / eta)
    }

    pub fn with_ramp(mut self, ramp: Ramp) -> Result<Self, DynamicsError> {
        if let Ramp::Cosine { window } = ramp {
            if !(window.is_finite() && window > 0.0) {
                return Err(DynamicsError::NonPositive { name: "ramp window", value: window });
            }
            if 2.0 * window > self.t_final {
                return Err(DynamicsError::RampTooLong { window, t_final: self.t_final });
            }
        }
        self.ramp = ramp;
        Ok(self)
    }

    pub fn with_resonance_tol(mut self, tol: f64) -> Self {
        self.resonance_tol = Some(tol);
        self
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn t_final(&self) -> f64 {
        self.t_final
    }
    pub fn ramp(&self) -> Ramp {
        self.ramp
    }

    /// Slow time reached at the end of the drive, `τ = η t_f`.
    pub fn tau(&self) -> f64 {
        self.eta * self.t_final
    }

    /// Resonance tolerance on [`resonance_offset`]; defaults to `η/2`.
    pub fn resonance_tol(&self) -> f64 {
        self.resonance_tol.unwrap_or(self.eta / 2.0)
    }

    pub fn is_perturbative(&self) -> bool {
        self.eta <= ETA_WARN
    }

    /// Modulation envelope in `[0, 1]`; zero outside `[0, t_f]`.
    pub fn envelope(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.t_final {
            return 0.0;
        }
        match self.ramp {
            Ramp::Hard => 1.0,
            Ramp::Cosine { window } => {
                let edge = t.min(self.t_final - t);
                if edge >= window {
                    1.0
                } else {
                    0.5 * (1.0 - (PI * edge / window).cos())
                }
            }
        }
    }

    /// Relative modulation `E(t)/E0 − 1`.
    pub fn modulation(&self, t: f64) -> f64 {
        4.0 * self.eta * self.envelope(t) * (self.omega * t).sin()
    }
}

/// Josephson energy `E(t)`, J.
pub fn drive_energy(spec: &CircuitSpec, drive: &DriveSpec, t: f64) -> f64 {
    spec.e0() * (1.0 + drive.modulation(t))
}

/// Dispersion of mode `j` evaluated at `E(t)`, rad/s.
pub fn instantaneous_frequency(
    spec: &CircuitSpec,
    drive: &DriveSpec,
    j: i64,
    t: f64,
) -> Result<f64, DynamicsError> {
    Ok(spec.dispersion(j, drive_energy(spec, drive, t))?)
}

/// `(Ω − 2ω0_h)/(2ω0_h)`.
pub fn resonance_offset(drive: &DriveSpec, omega0: f64) -> f64 {
    (drive.omega() - 2.0 * omega0) / (2.0 * omega0)
}

pub fn is_resonant(drive: &DriveSpec, omega0: f64) -> bool {
    resonance_offset(drive, omega0).abs() <= drive.resonance_tol()
}

/// Slow-time growth rate of the resonant mode, 1/s:
/// `ω0_h` (massless) or `Ẽ0/(C ω0_h)` (massive).
pub fn growth_rate(spec: &CircuitSpec, h: i64) -> Result<f64, LatticeError> {
    let omega0 = spec.omega0(h)?;
    Ok(match spec.drive_class() {
        DriveClass::Massless => omega0,
        DriveClass::Massive => spec.tilde_e0() / (spec.capacitance() * omega0),
    })
}

/// Coefficients of `Q = A e^{iω0 t} + B e^{−iω0 t}`, in units of `1/√(rad/s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudePair {
    pub a: Complex64,
    pub b: Complex64,
}

/// Closed-form multiscale amplitudes at slow time `tau`.
///
/// Off resonance the Dirac factor vanishes and the amplitudes keep their
/// initial values `(0, 1/√(2ω0))`.
pub fn multiscale_ab(
    spec: &CircuitSpec,
    drive: &DriveSpec,
    h: i64,
    tau: f64,
) -> Result<AmplitudePair, DynamicsError> {
    let omega0 = spec.omega0(h)?;
    let norm = 1.0 / (2.0 * omega0).sqrt();
    let x = if is_resonant(drive, omega0) {
        growth_rate(spec, h)? * tau
    } else {
        0.0
    };
    Ok(AmplitudePair {
        a: Complex64::new(norm * x.sinh(), 0.0),
        b: Complex64::new(norm * x.cosh(), 0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AnalyticMultiscale,
    NumericOde,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::AnalyticMultiscale => "analytic",
            Method::NumericOde => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovResult {
    pub mode: i64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub method: Method,
    /// s
    pub tau: f64,
    pub resonant: bool,
}

impl BogoliubovResult {
    /// Created particles `|β|²`.
    pub fn particles(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// `|α|² − |β|²`; 1 for a unitary transformation.
    pub fn unitarity(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }
}

/// `α = √(2ω0) B`, `β = √(2ω0) A`.
pub fn bogoliubov_from_ab(
    ab: AmplitudePair,
    omega0: f64,
    mode: i64,
    method: Method,
    tau: f64,
    resonant: bool,
) -> BogoliubovResult {
    let scale = (2.0 * omega0).sqrt();
    BogoliubovResult {
        mode,
        alpha: scale * ab.b,
        beta: scale * ab.a,
        method,
        tau,
        resonant,
    }
}

/// Analytic Bogoliubov coefficients of mode `h` at the end of the drive.
pub fn analytic_bogoliubov(
    spec: &CircuitSpec,
    drive: &DriveSpec,
    h: i64,
) -> Result<BogoliubovResult, DynamicsError> {
    let omega0 = spec.omega0(h)?;
    let tau = drive.tau();
    let ab = multiscale_ab(spec, drive, h, tau)?;
    Ok(bogoliubov_from_ab(
        ab,
        omega0,
        h,
        Method::AnalyticMultiscale,
        tau,
        is_resonant(drive, omega0),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `Q̇(0) = −iω0 Q(0)`, continuous with the undriven mode function.
    #[default]
    ModeContinuity,
    /// `Q̇(0) = −i√(2ω0)` with `Q(0) = 1/√(2ω0)`: twice the mode-continuous rate.
    DoubledRate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Keep every `stride`-th accepted step (the final step is always kept).
    pub stride: usize,
    pub initial_condition: InitialCondition,
    pub max_steps: u32,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            stride: 1,
            initial_condition: InitialCondition::ModeContinuity,
            max_steps: 1_000_000,
        }
    }
}

/// Sampled solution of the driven oscillator for one mode.
///
/// `q = √(2ω0)·Q` and `q_dot = dq/d(ω0 t)` are dimensionless; `q(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub mode: i64,
    /// rad/s
    pub omega0: f64,
    /// s
    pub times: Vec<f64>,
    pub q: Vec<Complex64>,
    pub q_dot: Vec<Complex64>,
    /// `|W(t)/W(0) − 1|` with `W = q q̇* − q* q̇`, per sample.
    pub wronskian_drift: Vec<f64>,
    pub accepted_steps: u32,
}

impl ModeTrajectory {
    pub fn max_wronskian_drift(&self) -> f64 {
        self.wronskian_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial sample")
    }

    /// Physical `Q(t)` (units `1/√(rad/s)`) at sample `i`.
    pub fn flux_coefficient(&self, i: usize) -> Complex64 {
        self.q[i] / (2.0 * self.omega0).sqrt()
    }

    /// Physical `Q̇(t)` at sample `i`.
    pub fn flux_coefficient_rate(&self, i: usize) -> Complex64 {
        self.q_dot[i] * self.omega0 / (2.0 * self.omega0).sqrt()
    }
}

fn wronskian(q: Complex64, p: Complex64) -> Complex64 {
    q * p.conj() - q.conj() * p
}

struct ModeOscillator<'a> {
    spec: &'a CircuitSpec,
    drive: &'a DriveSpec,
    theta: f64,
    omega0: f64,
}

impl ModeOscillator<'_> {
    /// `(ω(t)/ω0)²` at dimensionless time `s`.
    fn stiffness(&self, s: f64) -> f64 {
        let t = s / self.omega0;
        let et = self.spec.tilde_e0() * (1.0 + self.drive.modulation(t));
        let w = self.spec.dispersion_at(self.theta, et) / self.omega0;
        w * w
    }
}

impl System<f64, State> for ModeOscillator<'_> {
    fn system(&self, _s: f64, y: &State, dy: &mut State) {
        let k = self.stiffness(y[4]);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -k * y[0];
        dy[3] = -k * y[1];
        dy[4] = 1.0;
    }
}

/// Integrates `Q̈ + ω_h²(t) Q = 0` from `t = 0` to `t_f`.
pub fn integrate_mode(
    spec: &CircuitSpec,
    drive: &DriveSpec,
    h: i64,
    opts: &IntegratorOptions,
) -> Result<ModeTrajectory, DynamicsError> {
    for (name, value) in [("rtol", opts.rtol), ("atol", opts.atol)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(DynamicsError::NonPositive { name, value });
        }
    }
    let omega0 = spec.omega0(h)?;
    let theta = spec.phase_advance(h)?;
    let p0 = match opts.initial_condition {
        InitialCondition::ModeContinuity => -I,
        // Q̇(0)·√(2ω0)/ω0 with Q̇(0) = −i√(2ω0)
        InitialCondition::DoubledRate => -2.0 * I,
    };
    let y0 = State::from([1.0, 0.0, p0.re, p0.im, 0.0]);
    let s_end = omega0 * drive.t_final();
    let system = ModeOscillator { spec, drive, theta, omega0 };
    let mut solver = Dop853::from_param(
        system,
        0.0,
        s_end,
        0.0,
        y0,
        opts.rtol,
        opts.atol,
        0.9,
        0.0,
        0.333,
        6.0,
        s_end,
        0.0,
        opts.max_steps,
        1000,
        OutputType::Sparse,
    );
    let stats = solver.integrate().map_err(|e| {
        let (x, reason) = match &e {
            IntegrationError::MaxNumStepReached { x, .. } => (*x, e.to_string()),
            IntegrationError::StepSizeUnderflow { x } => (*x, "step size underflow".to_string()),
            IntegrationError::StiffnessDetected { x } => (*x, "stiffness detected".to_string()),
        };
        DynamicsError::IntegrationFailed {
            last_time: x / omega0,
            reason,
        }
    })?;

    let xs = solver.x_out();
    let ys = solver.y_out();
    let w0 = wronskian(Complex64::new(1.0, 0.0), p0);
    let stride = opts.stride.max(1);
    let last = xs.len() - 1;
    let mut traj = ModeTrajectory {
        mode: h,
        omega0,
        times: Vec::new(),
        q: Vec::new(),
        q_dot: Vec::new(),
        wronskian_drift: Vec::new(),
        accepted_steps: stats.accepted_steps,
    };
    let mut max_drift: f64 = 0.0;
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        let q = Complex64::new(y[0], y[1]);
        let p = Complex64::new(y[2], y[3]);
        let drift = (wronskian(q, p) / w0 - 1.0).norm();
        max_drift = max_drift.max(drift);
        if i % stride == 0 || i == last {
            traj.times.push(x / omega0);
            traj.q.push(q);
            traj.q_dot.push(p);
            // running maximum so decimated output never hides a bad step
            traj.wronskian_drift.push(max_drift);
        }
    }
    Ok(traj)
}

/// Inverts `Q = A e^{iω0 t} + B e^{−iω0 t}` at the last sample (post-drive epoch).
pub fn extract_ab_numeric(traj: &ModeTrajectory, omega0: f64, t_final: f64) -> AmplitudePair {
    let i = traj.times.len() - 1;
    let q = traj.flux_coefficient(i);
    let qd = traj.flux_coefficient_rate(i);
    let ph = omega0 * t_final;
    let forward = Complex64::from_polar(1.0, -ph);
    AmplitudePair {
        a: forward * (q + qd / (I * omega0)) / 2.0,
        b: forward.conj() * (q - qd / (I * omega0)) / 2.0,
    }
}

/// Numeric Bogoliubov coefficients together with the trajectory they came from.
pub fn numeric_bogoliubov(
    spec: &CircuitSpec,
    drive: &DriveSpec,
    h: i64,
    opts: &IntegratorOptions,
) -> Result<(BogoliubovResult, ModeTrajectory), DynamicsError> {
    let omega0 = spec.omega0(h)?;
    let traj = integrate_mode(spec, drive, h, opts)?;
    let ab = extract_ab_numeric(&traj, omega0, drive.t_final());
    let result = bogoliubov_from_ab(
        ab,
        omega0,
        h,
        Method::NumericOde,
        drive.tau(),
        is_resonant(drive, omega0),
    );
    Ok((result, traj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::CircuitFamily;
    use approx::assert_relative_eq;

    fn lhtl1() -> CircuitSpec {
        CircuitSpec::reference(CircuitFamily::Lhtl1)
    }

    #[test]
    fn drive_energy_examples() {
        let s = lhtl1();
        let d = DriveSpec::new(0.01, 2e11, 1e-10).unwrap();
        assert_eq!(drive_energy(&s, &d, 0.0), s.e0());
        assert_relative_eq!(
            drive_energy(&s, &d, PI / (2.0 * d.omega())),
            s.e0() * 1.04,
            max_relative = 1e-14
        );
        assert_eq!(drive_energy(&s, &d, 2e-10), s.e0());
        assert_eq!(drive_energy(&s, &d, -1e-12), s.e0());
    }

    #[test]
    fn drive_validation() {
        assert!(matches!(DriveSpec::new(0.2, 1.0, 1.0), Err(DynamicsError::BadEta(_))));
        assert!(matches!(DriveSpec::new(-0.01, 1.0, 1.0), Err(DynamicsError::BadEta(_))));
        assert!(DriveSpec::new(0.01, 0.0, 1.0).is_err());
        assert!(DriveSpec::new(0.01, 1.0, -1.0).is_err());
        assert!(!DriveSpec::new(0.08, 1.0, 1.0).unwrap().is_perturbative());
        let d = DriveSpec::new(0.01, 1.0, 1.0).unwrap();
        assert!(d.with_ramp(Ramp::Cosine { window: 0.6 }).is_err());
        assert!(d.with_ramp(Ramp::Cosine { window: 0.2 }).is_ok());
    }

    #[test]
    fn cosine_envelope_shape() {
        let d = DriveSpec::new(0.01, 1.0, 10.0)
            .unwrap()
            .with_ramp(Ramp::Cosine { window: 2.0 })
            .unwrap();
        assert_eq!(d.envelope(0.0), 0.0);
        assert_relative_eq!(d.envelope(1.0), 0.5, max_relative = 1e-14);
        assert_eq!(d.envelope(5.0), 1.0);
        assert_relative_eq!(d.envelope(9.0), 0.5, max_relative = 1e-12);
        assert!(d.envelope(10.0).abs() < 1e-15);
    }

    #[test]
    fn instantaneous_frequency_identities() {
        let t = 3.7e-12;
        let eta = 0.01;
        for f in CircuitFamily::ALL {
            let s = CircuitSpec::reference(f);
            let d = DriveSpec::new(eta, 1.3e11, 1e-10).unwrap();
            for j in [1, 17, 100] {
                let w0 = s.omega0(j).unwrap();
                let w = instantaneous_frequency(&s, &d, j, t).unwrap();
                let sin = (d.omega() * t).sin();
                match f.drive_class() {
                    DriveClass::Massless => {
                        assert!((w * w / (w0 * w0) - 1.0 - 4.0 * eta * sin).abs() < 1e-12)
                    }
                    DriveClass::Massive => {
                        let lhs = w * w - w0 * w0;
                        let rhs = 4.0 * eta * s.tilde_e0() / s.capacitance() * sin;
                        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
                    }
                }
            }
            let undriven = DriveSpec::new(0.0, 1.3e11, 1e-10).unwrap();
            assert_eq!(
                instantaneous_frequency(&s, &undriven, 5, t).unwrap(),
                s.omega0(5).unwrap()
            );
        }
    }

    #[test]
    fn multiscale_examples() {
        let s = lhtl1();
        let h = 60;
        let w0 = s.omega0(h).unwrap();
        let d = DriveSpec::resonant(&s, h, 0.01, 1e-12).unwrap();
        let ab = multiscale_ab(&s, &d, h, 0.0).unwrap();
        assert_eq!(ab.a, Complex64::new(0.0, 0.0));
        assert_relative_eq!(ab.b.re, 1.0 / (2.0 * w0).sqrt(), max_relative = 1e-15);

        let ab = multiscale_ab(&s, &d, h, 0.5 / w0).unwrap();
        assert_relative_eq!(ab.a.re * (2.0 * w0).sqrt(), 0.521_095_305_493_747, max_relative = 1e-12);

        let off = DriveSpec::new(0.01, 2.0 * w0 * 1.1, 1e-10).unwrap();
        assert_eq!(multiscale_ab(&s, &off, h, 1e-12).unwrap().a, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn massive_multiscale_argument() {
        let s = CircuitSpec::reference(CircuitFamily::Lhtl2);
        let h = 100;
        let d = DriveSpec::resonant(&s, h, 0.01, 1e-12).unwrap();
        let r = analytic_bogoliubov(&s, &d, h).unwrap();
        let x = s.tilde_e0() * 1e-12 / (s.capacitance() * s.omega0(h).unwrap());
        assert_relative_eq!(r.particles(), x.sinh().powi(2), max_relative = 1e-12);
    }

    #[test]
    fn bogoliubov_identity_and_unitarity() {
        let w0: f64 = 3e11;
        let norm = 1.0 / (2.0 * w0).sqrt();
        let id = bogoliubov_from_ab(
            AmplitudePair { a: Complex64::new(0.0, 0.0), b: Complex64::new(norm, 0.0) },
            w0,
            1,
            Method::AnalyticMultiscale,
            0.0,
            true,
        );
        assert_relative_eq!(id.alpha.re, 1.0, max_relative = 1e-15);
        assert_eq!(id.beta, Complex64::new(0.0, 0.0));

        let s = lhtl1();
        let h = 80;
        let w0 = s.omega0(h).unwrap();
        let d = DriveSpec::resonant(&s, h, 0.01, 1.0 / w0).unwrap();
        let r = analytic_bogoliubov(&s, &d, h).unwrap();
        assert_relative_eq!(r.particles(), 1.381_097_845_541_815_5, max_relative = 1e-12);
        assert_relative_eq!(r.unitarity(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn resonance_offset_examples() {
        let w0 = 1e11;
        let eta = 0.01;
        let on = DriveSpec::new(eta, 2.0 * w0, 1.0).unwrap();
        assert_eq!(resonance_offset(&on, w0), 0.0);
        let off = DriveSpec::new(eta, 2.0 * w0 * (1.0 + 10.0 * eta), 1.0)
            .unwrap()
            .with_resonance_tol(eta);
        assert_relative_eq!(resonance_offset(&off, w0), 10.0 * eta, max_relative = 1e-12);
        assert!(!is_resonant(&off, w0));
        // Ω = 0 is rejected by DriveSpec; the offset formula itself gives −1
        let tiny = DriveSpec::new(eta, f64::MIN_POSITIVE, 1.0).unwrap();
        assert_relative_eq!(resonance_offset(&tiny, w0), -1.0);
    }

    #[test]
    fn undriven_oscillator_stays_on_negative_branch() {
        let s = lhtl1();
        let h = 30;
        let w0 = s.omega0(h).unwrap();
        let d = DriveSpec::new(0.0, 2.0 * w0, 40.0 / w0).unwrap();
        let opts = IntegratorOptions::default();
        let traj = integrate_mode(&s, &d, h, &opts).unwrap();
        for (t, q) in traj.times.iter().zip(&traj.q) {
            let exact = Complex64::from_polar(1.0, -w0 * t);
            assert!((q - exact).norm() < 1e-8, "t={t}: {q} vs {exact}");
        }
        let ab = extract_ab_numeric(&traj, w0, d.t_final());
        assert!(ab.a.norm() * (2.0 * w0).sqrt() < 1e-8);
        assert!((ab.b * (2.0 * w0).sqrt() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn extraction_reconstructs_final_state() {
        let s = lhtl1();
        let h = 12;
        let w0 = s.omega0(h).unwrap();
        let d = DriveSpec::resonant(&s, h, 0.02, 0.7 / w0).unwrap();
        let traj = integrate_mode(&s, &d, h, &IntegratorOptions::default()).unwrap();
        let tf = d.t_final();
        let ab = extract_ab_numeric(&traj, w0, tf);
        let rebuilt = ab.a * Complex64::from_polar(1.0, w0 * tf) + ab.b * Complex64::from_polar(1.0, -w0 * tf);
        let q = traj.flux_coefficient(traj.times.len() - 1);
        assert!((rebuilt - q).norm() <= 1e-12 * q.norm());
    }

    #[test]
    fn doubled_rate_initial_condition_breaks_identity_at_start() {
        let s = lhtl1();
        let h = 40;
        let w0 = s.omega0(h).unwrap();
        let d = DriveSpec::new(0.0, 2.0 * w0, 5.0 / w0).unwrap();
        let opts = IntegratorOptions {
            initial_condition: InitialCondition::DoubledRate,
            ..Default::default()
        };
        let (r, _) = numeric_bogoliubov(&s, &d, h, &opts).unwrap();
        // q̇(0) = −2i ⇒ α = 3/2, β = −1/2 even without drive
        assert_relative_eq!(r.alpha.norm(), 1.5, max_relative = 1e-8);
        assert_relative_eq!(r.beta.norm(), 0.5, max_relative = 1e-8);
    }

    #[test]
    fn bad_tolerances_rejected() {
        let s = lhtl1();
        let d = DriveSpec::new(0.01, 1e11, 1e-11).unwrap();
        let opts = IntegratorOptions { rtol: 0.0, ..Default::default() };
        assert!(matches!(
            integrate_mode(&s, &d, 3, &opts),
            Err(DynamicsError::NonPositive { name: "rtol", .. })
        ));
    }

    #[test]
    fn step_budget_exhaustion_reports_time() {
        let s = lhtl1();
        let h = 5;
        let d = DriveSpec::resonant(&s, h, 0.01, 1e-12).unwrap();
        let opts = IntegratorOptions { max_steps: 3, ..Default::default() };
        match integrate_mode(&s, &d, h, &opts) {
            Err(DynamicsError::IntegrationFailed { last_time, .. }) => {
                assert!(last_time > 0.0 && last_time < d.t_final())
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
