//! Created particle numbers, output energies and per-family spectra.

use std::f64::consts::LN_10;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{
    self, DriveSpec, DynamicsError, IntegratorOptions, Method,
};
use crate::lattice::{CircuitFamily, CircuitSpec, LatticeError};

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "TLINE_DCE_THREADS";

/// Above this argument `sinh²x` is evaluated in the log domain.
pub const LOG_DOMAIN_THRESHOLD: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("slow time τ must be non-negative and finite, got {0} s")]
    NegativeTau(f64),
    #[error("particle number must be non-negative, got {0}")]
    NegativeParticles(f64),
    #[error("{THREADS_ENV}='{0}' is not a positive integer")]
    BadThreadCount(String),
    #[error("sweep specs disagree on the cell count ({0} vs {1})")]
    InconsistentCells(usize, usize),
    #[error("numeric sweeps need a drive amplitude η > 0")]
    MissingEta,
}

/// `N` together with `log10 N`, the latter finite even when `N` overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleNumber {
    /// `+inf` when the value exceeds the double range.
    pub n: f64,
    pub log10_n: f64,
}

/// `log10(sinh²x)` for `x ≥ 0`.
pub fn log10_sinh2(x: f64) -> f64 {
    if x <= LOG_DOMAIN_THRESHOLD {
        2.0 * x.sinh().log10()
    } else {
        // sinh x = eˣ(1 − e^{−2x})/2
        2.0 * (x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2) / LN_10
    }
}

/// `sinh²x` with its `log10` companion.
pub fn sinh2(x: f64) -> ParticleNumber {
    let log10_n = log10_sinh2(x);
    let n = if x <= LOG_DOMAIN_THRESHOLD {
        x.sinh().powi(2)
    } else {
        10f64.powf(log10_n)
    };
    ParticleNumber { n, log10_n }
}

/// Particles created in resonantly driven mode `h` after slow time `tau`:
/// `sinh²(ω0_h τ)` (massless) or `sinh²(Ẽ0 τ/(C ω0_h))` (massive).
pub fn particle_number_analytic(
    spec: &CircuitSpec,
    h: i64,
    tau: f64,
) -> Result<ParticleNumber, ObservableError> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(ObservableError::NegativeTau(tau));
    }
    Ok(sinh2(dynamics::growth_rate(spec, h)? * tau))
}

/// `|β_hh|²` from the integrated oscillator.
///
/// Meant for resonant drives; off resonance it measures the residual creation.
pub fn particle_number_numeric(
    spec: &CircuitSpec,
    drive: &DriveSpec,
    h: i64,
    opts: &IntegratorOptions,
) -> Result<f64, ObservableError> {
    let (r, _) = dynamics::numeric_bogoliubov(spec, drive, h, opts)?;
    Ok(r.particles())
}

/// Output energy `ε_h N_h`, J.
pub fn mode_energy(spec: &CircuitSpec, h: i64, particles: f64) -> Result<f64, ObservableError> {
    if !(particles >= 0.0) {
        return Err(ObservableError::NegativeParticles(particles));
    }
    Ok(spec.epsilon0(h)? * particles)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    StrictlyIncreasing,
    StrictlyDecreasing,
    NonMonotonic,
}

impl Trend {
    pub fn of(values: &[f64]) -> Trend {
        let pairs = || values.windows(2);
        if pairs().all(|w| w[1] > w[0]) {
            Trend::StrictlyIncreasing
        } else if pairs().all(|w| w[1] < w[0]) {
            Trend::StrictlyDecreasing
        } else {
            Trend::NonMonotonic
        }
    }

    /// Trend of `N_j` over the positive branch at reference parameters.
    pub fn expected(family: CircuitFamily) -> Trend {
        match family {
            CircuitFamily::Lhtl1 | CircuitFamily::Rhtl1 => Trend::StrictlyDecreasing,
            CircuitFamily::Lhtl2 | CircuitFamily::Rhtl2 => Trend::StrictlyIncreasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub j: i64,
    /// rad/s
    pub omega0: f64,
    /// rad/s
    pub epsilon_over_hbar: f64,
    /// Drive frequency `2ω0_j`, rad/s.
    pub omega_drive: f64,
    pub n: f64,
    pub log10_n: f64,
    /// `(ε_j/ħ)·N_j`, rad/s.
    pub e_over_hbar: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    pub method: Method,
    pub observed: Trend,
    pub expected: Trend,
    pub matches: bool,
}

/// Resonance sweep of one family over `j = 1..=N/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: CircuitFamily,
    /// s
    pub tau: f64,
    /// Sorted by `j`, then analytic before numeric.
    pub rows: Vec<SweepRow>,
    pub trends: Vec<TrendSummary>,
    /// Largest `j` integrated numerically when the mode cap truncated the sweep.
    pub numeric_truncated_at: Option<i64>,
}

impl SweepResult {
    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub methods: Vec<Method>,
    /// Drive amplitude for numeric rows; the drive lasts `t_f = τ/η`.
    pub eta: Option<f64>,
    pub integrator: IntegratorOptions,
    /// Numeric rows are produced only for `j ≤ cap`.
    pub numeric_mode_cap: Option<usize>,
    /// Worker threads; `None` reads [`THREADS_ENV`] and falls back to rayon's default.
    pub threads: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            methods: vec![Method::AnalyticMultiscale],
            eta: None,
            integrator: IntegratorOptions::default(),
            numeric_mode_cap: None,
            threads: None,
        }
    }
}

/// Reads [`THREADS_ENV`].
pub fn thread_cap_from_env() -> Result<Option<usize>, ObservableError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ObservableError::BadThreadCount(v)),
        },
    }
}

fn sweep_row(
    spec: &CircuitSpec,
    j: i64,
    tau: f64,
    method: Method,
    opts: &SweepOptions,
) -> Result<SweepRow, ObservableError> {
    let omega0 = spec.omega0(j)?;
    let epsilon_over_hbar = spec.epsilon0_over_hbar(j)?;
    let pn = match method {
        Method::AnalyticMultiscale => particle_number_analytic(spec, j, tau)?,
        Method::NumericOde => {
            let eta = opts.eta.filter(|&e| e > 0.0).ok_or(ObservableError::MissingEta)?;
            let drive = DriveSpec::resonant(spec, j, eta, tau)?;
            let n = particle_number_numeric(spec, &drive, j, &opts.integrator)?;
            ParticleNumber { n, log10_n: n.log10() }
        }
    };
    Ok(SweepRow {
        j,
        omega0,
        epsilon_over_hbar,
        omega_drive: 2.0 * omega0,
        n: pn.n,
        log10_n: pn.log10_n,
        e_over_hbar: epsilon_over_hbar * pn.n,
        method,
    })
}

/// Drives every positive mode of every spec at `Ω = 2ω0_j` for slow time `tau`.
///
/// Work is spread over a rayon pool; the output order is fixed by
/// `(spec order, j, method)` and does not depend on scheduling.
pub fn sweep_spectrum(
    specs: &[CircuitSpec],
    tau: f64,
    opts: &SweepOptions,
) -> Result<Vec<SweepResult>, ObservableError> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(ObservableError::NegativeTau(tau));
    }
    if let Some(first) = specs.first() {
        if let Some(other) = specs.iter().find(|s| s.cells() != first.cells()) {
            return Err(ObservableError::InconsistentCells(first.cells(), other.cells()));
        }
    }
    let threads = match opts.threads {
        Some(n) => Some(n),
        None => thread_cap_from_env()?,
    };

    let mut jobs = Vec::new();
    for (s, spec) in specs.iter().enumerate() {
        for j in spec.positive_modes() {
            for &m in &opts.methods {
                let capped = m == Method::NumericOde
                    && opts.numeric_mode_cap.is_some_and(|cap| j as usize > cap);
                if !capped {
                    jobs.push((s, j, m));
                }
            }
        }
    }

    let run = || {
        jobs.par_iter()
            .map(|&(s, j, m)| sweep_row(&specs[s], j, tau, m, opts).map(|r| (s, r)))
            .collect::<Result<Vec<_>, _>>()
    };
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool with a positive thread count")
            .install(run)?,
        None => run()?,
    };

    let mut out: Vec<SweepResult> = specs
        .iter()
        .map(|spec| SweepResult {
            family: spec.family(),
            tau,
            rows: Vec::new(),
            trends: Vec::new(),
            numeric_truncated_at: None,
        })
        .collect();
    for (s, row) in rows {
        out[s].rows.push(row);
    }
    for (result, spec) in out.iter_mut().zip(specs) {
        result.rows.sort_by_key(|r| (r.j, r.method == Method::NumericOde));
        for &m in &opts.methods {
            let values: Vec<f64> = result.rows_for(m).map(|r| r.n).collect();
            let observed = Trend::of(&values);
            let expected = Trend::expected(result.family);
            result.trends.push(TrendSummary {
                method: m,
                observed,
                expected,
                matches: observed == expected,
            });
        }
        if opts.methods.contains(&Method::NumericOde) {
            result.numeric_truncated_at = opts
                .numeric_mode_cap
                .filter(|&cap| (cap as i64) < spec.half())
                .map(|cap| cap as i64);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionRow {
    pub family: CircuitFamily,
    pub j: i64,
    pub k_dx: f64,
    /// rad/s
    pub omega0: f64,
    /// rad/s
    pub epsilon_over_hbar: Option<f64>,
}

/// `ω0_j` (and optionally `ε_j/ħ`) over the positive branch of each spec.
pub fn dispersion_table(
    specs: &[CircuitSpec],
    include_eigenenergies: bool,
) -> Result<Vec<DispersionRow>, ObservableError> {
    let mut rows = Vec::new();
    for spec in specs {
        for j in spec.positive_modes() {
            rows.push(DispersionRow {
                family: spec.family(),
                j,
                k_dx: spec.phase_advance(j)?,
                omega0: spec.omega0(j)?,
                epsilon_over_hbar: if include_eigenenergies {
                    Some(spec.epsilon0_over_hbar(j)?)
                } else {
                    None
                },
            });
        }
    }
    Ok(rows)
}
