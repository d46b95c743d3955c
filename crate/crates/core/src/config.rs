//! Run configuration: JSON text with unit-suffixed quantities.
//!
//! ```json
//! {
//!   "circuit": { "family": ["LHTL1", "RHTL2"], "N": 200, "C": "0.4 pF",
//!                "C_J": "0.02 pF", "L": "60 pH", "I_c": "1.25 uA", "delta_x": "1 m" },
//!   "drive":   { "eta": 0.01, "resonant_with_mode": 60, "tau": "1 ps" },
//!   "run":     { "method": "both", "rtol": 1e-10, "atol": 1e-12,
//!                "out": "out", "format": "csv" }
//! }
//! ```
//!
//! Every block and field is optional; missing values fall back to the
//! reference lattice driven at `η = 0.01` on mode 60 for `τ = 1 ps`.
//! Dimensioned values must be strings carrying a unit; bare numbers are
//! rejected. Errors name the offending field and its line in the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::{self, DriveSpec, DynamicsError, InitialCondition, IntegratorOptions, Ramp};
use crate::lattice::{CircuitFamily, CircuitSpec, LatticeError};
use crate::output::Format;
use crate::units::{format_si, parse_quantity, Dimension, UnitError};

pub const DEFAULT_ETA: f64 = 0.01;
pub const DEFAULT_RESONANT_MODE: i64 = 60;
pub const DEFAULT_TAU: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: field '{field}'{}: {message}", location(*.line))]
    Field {
        path: String,
        field: String,
        line: Option<usize>,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn location(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMethod {
    Analytic,
    Numeric,
    Both,
}

impl RunMethod {
    pub fn name(self) -> &'static str {
        match self {
            RunMethod::Analytic => "analytic",
            RunMethod::Numeric => "numeric",
            RunMethod::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(RunMethod::Analytic),
            "numeric" => Some(RunMethod::Numeric),
            "both" => Some(RunMethod::Both),
            _ => None,
        }
    }

    pub fn analytic(self) -> bool {
        self != RunMethod::Numeric
    }

    pub fn numeric(self) -> bool {
        self != RunMethod::Analytic
    }
}

pub fn parse_format(s: &str) -> Option<Format> {
    match s {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        _ => None,
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// How the drive frequency is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveFrequency {
    /// rad/s
    Explicit(f64),
    /// `Ω = 2ω0_j`, resolved per family.
    ResonantWithMode(i64),
}

/// How long the drive lasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveDuration {
    /// s
    FinalTime(f64),
    /// Slow time `τ = η t_f`, s.
    SlowTime(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitConfig {
    pub families: Vec<CircuitFamily>,
    pub cells: usize,
    pub capacitance: f64,
    pub junction_capacitance: f64,
    pub inductance: f64,
    pub critical_current: f64,
    pub delta_x: f64,
    pub rhtl2_approx: bool,
}

impl CircuitConfig {
    pub fn spec(&self, family: CircuitFamily) -> Result<CircuitSpec, LatticeError> {
        Ok(CircuitSpec::new(
            family,
            self.cells,
            self.delta_x,
            self.capacitance,
            self.junction_capacitance,
            self.inductance,
            self.critical_current,
        )?
        .with_rhtl2_approx(self.rhtl2_approx))
    }

    pub fn specs(&self) -> Result<Vec<CircuitSpec>, LatticeError> {
        self.families.iter().map(|&f| self.spec(f)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    pub eta: f64,
    pub frequency: DriveFrequency,
    pub duration: DriveDuration,
    pub ramp: Ramp,
    pub initial_condition: InitialCondition,
    pub resonance_tol: Option<f64>,
}

impl DriveConfig {
    /// Slow time reached by the drive, s.
    pub fn tau(&self) -> f64 {
        match self.duration {
            DriveDuration::SlowTime(tau) => tau,
            DriveDuration::FinalTime(t) => self.eta * t,
        }
    }

    /// Mode whose behaviour is reported by `evolve`.
    pub fn target_mode(&self, spec: &CircuitSpec) -> Result<i64, DynamicsError> {
        match self.frequency {
            DriveFrequency::ResonantWithMode(j) => {
                spec.check_mode(j)?;
                Ok(j)
            }
            // the positive mode closest to half the drive frequency
            DriveFrequency::Explicit(omega) => {
                let mut best = (1, f64::INFINITY);
                for j in spec.positive_modes() {
                    let d = (2.0 * spec.omega0(j)? - omega).abs();
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                Ok(best.0)
            }
        }
    }

    pub fn drive_for(&self, spec: &CircuitSpec) -> Result<DriveSpec, DynamicsError> {
        let omega = match self.frequency {
            DriveFrequency::Explicit(w) => w,
            DriveFrequency::ResonantWithMode(j) => 2.0 * spec.omega0(j)?,
        };
        let t_final = match self.duration {
            DriveDuration::FinalTime(t) => t,
            DriveDuration::SlowTime(tau) => {
                if !(self.eta > 0.0) {
                    return Err(DynamicsError::NonPositive {
                        name: "eta (a drive given by tau needs eta > 0; give t_f instead)",
                        value: self.eta,
                    });
                }
                tau / self.eta
            }
        };
        let mut d = DriveSpec::new(self.eta, omega, t_final)?.with_ramp(self.ramp)?;
        if let Some(tol) = self.resonance_tol {
            d = d.with_resonance_tol(tol);
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub method: RunMethod,
    pub rtol: f64,
    pub atol: f64,
    pub out: PathBuf,
    pub format: Format,
    pub numeric_mode_cap: Option<usize>,
    /// Keep every n-th accepted integrator step in trajectory dumps.
    pub trajectory_stride: usize,
}

impl RunOptions {
    pub fn integrator(&self, ic: InitialCondition) -> IntegratorOptions {
        IntegratorOptions {
            rtol: self.rtol,
            atol: self.atol,
            stride: self.trajectory_stride,
            initial_condition: ic,
            ..IntegratorOptions::default()
        }
    }
}

/// Fully resolved configuration in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub circuit: CircuitConfig,
    pub drive: DriveConfig,
    pub run: RunOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = CircuitSpec::reference(CircuitFamily::Lhtl1);
        Self {
            circuit: CircuitConfig {
                families: CircuitFamily::ALL.to_vec(),
                cells: r.cells(),
                capacitance: r.capacitance(),
                junction_capacitance: r.junction_capacitance(),
                inductance: r.inductance(),
                critical_current: r.critical_current(),
                delta_x: r.delta_x(),
                rhtl2_approx: false,
            },
            drive: DriveConfig {
                eta: DEFAULT_ETA,
                frequency: DriveFrequency::ResonantWithMode(DEFAULT_RESONANT_MODE),
                duration: DriveDuration::SlowTime(DEFAULT_TAU),
                ramp: Ramp::Hard,
                initial_condition: InitialCondition::ModeContinuity,
                resonance_tol: None,
            },
            run: RunOptions {
                method: RunMethod::Analytic,
                rtol: dynamics::DEFAULT_RTOL,
                atol: dynamics::DEFAULT_ATOL,
                out: PathBuf::from("out"),
                format: Format::Csv,
                numeric_mode_cap: None,
                trajectory_stride: 1,
            },
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    circuit: Option<RawCircuit>,
    drive: Option<RawDrive>,
    run: Option<RawRun>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    family: Option<Value>,
    #[serde(rename = "N")]
    cells: Option<Value>,
    #[serde(rename = "C")]
    capacitance: Option<Value>,
    #[serde(rename = "C_J")]
    junction_capacitance: Option<Value>,
    #[serde(rename = "L")]
    inductance: Option<Value>,
    #[serde(rename = "I_c")]
    critical_current: Option<Value>,
    delta_x: Option<Value>,
    rhtl2_approx: Option<Value>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    eta: Option<Value>,
    #[serde(rename = "Omega")]
    omega: Option<Value>,
    resonant_with_mode: Option<Value>,
    t_f: Option<Value>,
    tau: Option<Value>,
    ramp: Option<Value>,
    initial_condition: Option<Value>,
    resonance_tol: Option<Value>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRun {
    method: Option<Value>,
    rtol: Option<Value>,
    atol: Option<Value>,
    out: Option<Value>,
    format: Option<Value>,
    numeric_mode_cap: Option<Value>,
    trajectory_stride: Option<Value>,
}

/// Field-level diagnostics against the original text.
struct Ctx<'a> {
    path: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    /// Line of `"key"` inside `"block"`, searched textually.
    fn line_of(&self, block: &str, key: &str) -> Option<usize> {
        let start = self.text.find(&format!("\"{block}\"")).unwrap_or(0);
        let offset = self.text[start..].find(&format!("\"{key}\""))? + start;
        Some(self.text[..offset].matches('\n').count() + 1)
    }

    fn err(&self, block: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Field {
            path: self.path.to_string(),
            field: format!("{block}.{key}"),
            line: self.line_of(block, key),
            message: message.into(),
        }
    }

    fn quantity(&self, block: &str, key: &str, v: &Value, dim: Dimension) -> Result<f64, ConfigError> {
        match v {
            Value::String(s) => parse_quantity(s, dim).map_err(|e| self.err(block, key, e.to_string())),
            Value::Number(n) => Err(self.err(
                block,
                key,
                UnitError::MissingUnit {
                    input: n.to_string(),
                    dimension: dim,
                    unit: dim.si_unit(),
                }
                .to_string(),
            )),
            _ => Err(self.err(block, key, format!("expected a {dim} string such as \"1 {}\"", dim.si_unit()))),
        }
    }

    fn number(&self, block: &str, key: &str, v: &Value) -> Result<f64, ConfigError> {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err(block, key, "expected a dimensionless number"))
    }

    fn integer(&self, block: &str, key: &str, v: &Value) -> Result<i64, ConfigError> {
        v.as_i64().ok_or_else(|| self.err(block, key, "expected an integer"))
    }

    fn string<'v>(&self, block: &str, key: &str, v: &'v Value) -> Result<&'v str, ConfigError> {
        v.as_str().ok_or_else(|| self.err(block, key, "expected a string"))
    }

    fn boolean(&self, block: &str, key: &str, v: &Value) -> Result<bool, ConfigError> {
        v.as_bool().ok_or_else(|| self.err(block, key, "expected true or false"))
    }
}

pub fn parse_families(s: &str) -> Result<Vec<CircuitFamily>, String> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let f: CircuitFamily = part.parse().map_err(|e: crate::lattice::UnknownFamily| e.to_string())?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err("empty family list".to_string());
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    /// Parses configuration text; `origin` labels diagnostics.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let ctx = Ctx { path: origin, text };
        let mut cfg = RunConfig::default();

        let c = raw.circuit.unwrap_or_default();
        let b = "circuit";
        if let Some(v) = &c.family {
            let list = match v {
                Value::String(s) => parse_families(s),
                Value::Array(items) => items
                    .iter()
                    .map(|i| i.as_str().ok_or_else(|| "family entries must be strings".to_string()))
                    .collect::<Result<Vec<_>, _>>()
                    .and_then(|names| parse_families(&names.join(","))),
                _ => Err("expected a family name or a list of names".to_string()),
            };
            cfg.circuit.families = list.map_err(|m| ctx.err(b, "family", m))?;
        }
        if let Some(v) = &c.cells {
            let n = ctx.integer(b, "N", v)?;
            if n < 4 || n % 2 != 0 {
                return Err(ctx.err(b, "N", format!("cell count must be even and at least 4, got {n}")));
            }
            cfg.circuit.cells = n as usize;
        }
        for (key, v, dim, slot) in [
            ("C", &c.capacitance, Dimension::Capacitance, &mut cfg.circuit.capacitance),
            ("C_J", &c.junction_capacitance, Dimension::Capacitance, &mut cfg.circuit.junction_capacitance),
            ("L", &c.inductance, Dimension::Inductance, &mut cfg.circuit.inductance),
            ("I_c", &c.critical_current, Dimension::Current, &mut cfg.circuit.critical_current),
            ("delta_x", &c.delta_x, Dimension::Length, &mut cfg.circuit.delta_x),
        ] {
            if let Some(v) = v {
                let x = ctx.quantity(b, key, v, dim)?;
                if !(x > 0.0 && x.is_finite()) {
                    return Err(ctx.err(b, key, format!("must be strictly positive, got {x}")));
                }
                *slot = x;
            }
        }
        if let Some(v) = &c.rhtl2_approx {
            cfg.circuit.rhtl2_approx = ctx.boolean(b, "rhtl2_approx", v)?;
        }

        if let Some(d) = raw.drive {
            let b = "drive";
            if let Some(v) = &d.eta {
                let eta = ctx.number(b, "eta", v)?;
                if !(0.0..=dynamics::ETA_MAX).contains(&eta) {
                    return Err(ctx.err(b, "eta", format!("must lie in [0, {}], got {eta}", dynamics::ETA_MAX)));
                }
                cfg.drive.eta = eta;
            }
            cfg.drive.frequency = match (&d.omega, &d.resonant_with_mode) {
                (Some(_), Some(_)) => {
                    return Err(ctx.err(b, "Omega", "give either Omega or resonant_with_mode, not both"))
                }
                (None, None) => {
                    return Err(ctx.err(b, "Omega", "one of Omega or resonant_with_mode is required"))
                }
                (Some(v), None) => {
                    let w = ctx.quantity(b, "Omega", v, Dimension::AngularFrequency)?;
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(ctx.err(b, "Omega", format!("must be strictly positive, got {w}")));
                    }
                    DriveFrequency::Explicit(w)
                }
                (None, Some(v)) => {
                    let j = ctx.integer(b, "resonant_with_mode", v)?;
                    let half = (cfg.circuit.cells / 2) as i64;
                    if j == 0 || j.abs() > half {
                        return Err(ctx.err(
                            b,
                            "resonant_with_mode",
                            format!("mode {j} outside ±1..=±{half}"),
                        ));
                    }
                    DriveFrequency::ResonantWithMode(j)
                }
            };
            cfg.drive.duration = match (&d.t_f, &d.tau) {
                (Some(_), Some(_)) => return Err(ctx.err(b, "t_f", "give either t_f or tau, not both")),
                (None, None) => DriveDuration::SlowTime(DEFAULT_TAU),
                (Some(v), None) => {
                    let t = ctx.quantity(b, "t_f", v, Dimension::Time)?;
                    if !(t > 0.0 && t.is_finite()) {
                        return Err(ctx.err(b, "t_f", format!("must be strictly positive, got {t}")));
                    }
                    DriveDuration::FinalTime(t)
                }
                (None, Some(v)) => {
                    let tau = ctx.quantity(b, "tau", v, Dimension::Time)?;
                    if !(tau >= 0.0 && tau.is_finite()) {
                        return Err(ctx.err(b, "tau", format!("must be non-negative, got {tau}")));
                    }
                    DriveDuration::SlowTime(tau)
                }
            };
            if let Some(v) = &d.ramp {
                cfg.drive.ramp = match v {
                    Value::String(s) if s == "hard" => Ramp::Hard,
                    Value::Object(map) if map.len() == 1 && map.contains_key("cosine") => {
                        let w = ctx.quantity(b, "ramp", &map["cosine"], Dimension::Time)?;
                        Ramp::Cosine { window: w }
                    }
                    _ => return Err(ctx.err(b, "ramp", "expected \"hard\" or {\"cosine\": \"<window> s\"}")),
                };
            }
            if let Some(v) = &d.initial_condition {
                cfg.drive.initial_condition = match ctx.string(b, "initial_condition", v)? {
                    "mode-continuity" => InitialCondition::ModeContinuity,
                    "doubled-rate" => InitialCondition::DoubledRate,
                    other => {
                        return Err(ctx.err(
                            b,
                            "initial_condition",
                            format!("unknown value '{other}' (expected mode-continuity or doubled-rate)"),
                        ))
                    }
                };
            }
            if let Some(v) = &d.resonance_tol {
                let tol = ctx.number(b, "resonance_tol", v)?;
                if tol < 0.0 {
                    return Err(ctx.err(b, "resonance_tol", "must be non-negative"));
                }
                cfg.drive.resonance_tol = Some(tol);
            }
        }

        let r = raw.run.unwrap_or_default();
        let b = "run";
        if let Some(v) = &r.method {
            let s = ctx.string(b, "method", v)?;
            cfg.run.method = RunMethod::parse(s)
                .ok_or_else(|| ctx.err(b, "method", format!("unknown method '{s}' (analytic, numeric or both)")))?;
        }
        for (key, v, slot) in [("rtol", &r.rtol, &mut cfg.run.rtol), ("atol", &r.atol, &mut cfg.run.atol)] {
            if let Some(v) = v {
                let x = ctx.number(b, key, v)?;
                if !(x > 0.0) {
                    return Err(ctx.err(b, key, format!("must be strictly positive, got {x}")));
                }
                *slot = x;
            }
        }
        if let Some(v) = &r.out {
            cfg.run.out = PathBuf::from(ctx.string(b, "out", v)?);
        }
        if let Some(v) = &r.format {
            let s = ctx.string(b, "format", v)?;
            cfg.run.format =
                parse_format(s).ok_or_else(|| ctx.err(b, "format", format!("unknown format '{s}' (csv or json)")))?;
        }
        if let Some(v) = &r.numeric_mode_cap {
            if !v.is_null() {
                let n = ctx.integer(b, "numeric_mode_cap", v)?;
                if n < 1 {
                    return Err(ctx.err(b, "numeric_mode_cap", "must be at least 1"));
                }
                cfg.run.numeric_mode_cap = Some(n as usize);
            }
        }
        if let Some(v) = &r.trajectory_stride {
            let n = ctx.integer(b, "trajectory_stride", v)?;
            if n < 1 {
                return Err(ctx.err(b, "trajectory_stride", "must be at least 1"));
            }
            cfg.run.trajectory_stride = n as usize;
        }
        Ok(cfg)
    }

    /// The configuration as JSON in SI units; [`Self::from_json_str`] reads it back unchanged.
    pub fn to_json(&self) -> Value {
        let c = &self.circuit;
        let d = &self.drive;
        let r = &self.run;
        let mut drive = json!({
            "eta": d.eta,
            "ramp": match d.ramp {
                Ramp::Hard => json!("hard"),
                Ramp::Cosine { window } => json!({ "cosine": format_si(window, Dimension::Time) }),
            },
            "initial_condition": match d.initial_condition {
                InitialCondition::ModeContinuity => "mode-continuity",
                InitialCondition::DoubledRate => "doubled-rate",
            },
        });
        let obj = drive.as_object_mut().expect("drive block is an object");
        match d.frequency {
            DriveFrequency::Explicit(w) => {
                obj.insert("Omega".into(), json!(format_si(w, Dimension::AngularFrequency)));
            }
            DriveFrequency::ResonantWithMode(j) => {
                obj.insert("resonant_with_mode".into(), json!(j));
            }
        }
        match d.duration {
            DriveDuration::FinalTime(t) => obj.insert("t_f".into(), json!(format_si(t, Dimension::Time))),
            DriveDuration::SlowTime(t) => obj.insert("tau".into(), json!(format_si(t, Dimension::Time))),
        };
        if let Some(tol) = d.resonance_tol {
            obj.insert("resonance_tol".into(), json!(tol));
        }
        json!({
            "circuit": {
                "family": c.families.iter().map(|f| f.name()).collect::<Vec<_>>(),
                "N": c.cells,
                "C": format_si(c.capacitance, Dimension::Capacitance),
                "C_J": format_si(c.junction_capacitance, Dimension::Capacitance),
                "L": format_si(c.inductance, Dimension::Inductance),
                "I_c": format_si(c.critical_current, Dimension::Current),
                "delta_x": format_si(c.delta_x, Dimension::Length),
                "rhtl2_approx": c.rhtl2_approx,
            },
            "drive": drive,
            "run": {
                "method": r.method.name(),
                "rtol": r.rtol,
                "atol": r.atol,
                "out": r.out.display().to_string(),
                "format": format_name(r.format),
                "numeric_mode_cap": r.numeric_mode_cap,
                "trajectory_stride": r.trajectory_stride,
            },
        })
    }
}
