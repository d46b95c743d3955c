//! `tline-dce` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical
//! failure, 3 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{RunConfig, RunMethod};
use crate::dynamics::{self, BogoliubovResult, Method, ModeTrajectory};
use crate::lattice::{CircuitFamily, CircuitSpec};
use crate::observables::{self, SweepOptions};
use crate::output::{self, fmt_float, Format};
use crate::quantization::ModeSet;
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "tline-dce",
    version,
    about = "Spectra and parametric particle creation in SQUID transmission-line lattices"
)]
struct Cli {
    /// JSON run configuration (unit-suffixed quantities)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Comma-separated circuit families (LHTL1, LHTL2, RHTL1, RHTL2)
    #[arg(long, global = true, value_name = "NAME,...")]
    family: Option<String>,
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Relative tolerance of the mode integrator
    #[arg(long, global = true)]
    rtol: Option<f64>,
    /// Absolute tolerance of the mode integrator
    #[arg(long, global = true)]
    atol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dispersion relations, eigenenergies and mode tables at E0
    Dispersion,
    /// Drive one mode per family and report its Bogoliubov coefficients
    Evolve,
    /// Resonantly drive every mode of every family and tabulate N_j and E_j
    Sweep,
    /// Run the normalization, commutator, round-trip, unitarity and convergence checks
    Verify {
        #[arg(long, hide = true)]
        perturb_chi: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Verification(usize),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Verification(_) => EXIT_VERIFY,
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

fn numerical(e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(e.to_string())
}

/// Parses `args` (including the program name), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Config(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                Failure::Numerical(m) => {
                    let _ = writeln!(stderr, "numerical failure: {m}");
                }
                Failure::Verification(n) => {
                    let _ = writeln!(stderr, "verification failed: {n} check(s)");
                }
            }
            f.code()
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p).map_err(|e| Failure::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    if let Some(list) = &cli.family {
        cfg.circuit.families =
            crate::config::parse_families(list).map_err(|m| Failure::Config(format!("--family: {m}")))?;
    }
    if let Some(m) = cli.method {
        cfg.run.method = match m {
            MethodArg::Analytic => RunMethod::Analytic,
            MethodArg::Numeric => RunMethod::Numeric,
            MethodArg::Both => RunMethod::Both,
        };
    }
    if let Some(out) = &cli.out {
        cfg.run.out = out.clone();
    }
    if let Some(f) = cli.format {
        cfg.run.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    for (name, v, slot) in [("--rtol", cli.rtol, &mut cfg.run.rtol), ("--atol", cli.atol, &mut cfg.run.atol)] {
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Failure::Config(format!("{name} must be strictly positive, got {x}")));
            }
            *slot = x;
        }
    }
    Ok(cfg)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let cfg = resolve_config(&cli)?;
    let specs = cfg.circuit.specs().map_err(|e| Failure::Config(e.to_string()))?;
    for spec in &specs {
        for w in spec.warnings() {
            let _ = writeln!(stderr, "warning: {}: {w}", spec.family());
        }
    }
    match cli.command {
        Command::Dispersion => cmd_dispersion(&cfg, &specs, stdout),
        Command::Evolve => cmd_evolve(&cfg, &specs, stdout, stderr),
        Command::Sweep => cmd_sweep(&cfg, &specs, stdout),
        Command::Verify { perturb_chi } => cmd_verify(&cfg, perturb_chi, stdout),
    }
}

fn emit<F>(dir: &Path, name: &str, stdout: &mut dyn Write, body: F) -> Result<PathBuf, Failure>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let path = output::output_path(dir, name).map_err(|e| io_failure(dir, e))?;
    output::write_file(&path, body).map_err(|e| io_failure(&path, e))?;
    let _ = writeln!(stdout, "wrote {}", path.display());
    Ok(path)
}

fn cmd_dispersion(cfg: &RunConfig, specs: &[CircuitSpec], stdout: &mut dyn Write) -> Result<(), Failure> {
    let rows = observables::dispersion_table(specs, true).map_err(numerical)?;
    let out = &cfg.run.out;
    let mut infrared = None;
    for spec in specs.iter().filter(|s| s.family() == CircuitFamily::Lhtl1) {
        let ir = spec.infrared_limit().map_err(numerical)?;
        let _ = writeln!(
            stdout,
            "LHTL1 infrared limit: exact {} rad/s, approximate {} rad/s, relative difference {}",
            fmt_float(ir.exact),
            fmt_float(ir.approx),
            fmt_float((ir.approx - ir.exact) / ir.exact)
        );
        infrared = Some(ir);
    }
    match cfg.run.format {
        Format::Csv => {
            emit(out, "dispersion.csv", stdout, |b| output::write_dispersion_csv(b, &rows))?;
            for spec in specs {
                let modes = ModeSet::new(spec).map_err(numerical)?;
                emit(out, &format!("modes_{}.csv", spec.family()), stdout, |b| {
                    output::write_mode_table_csv(b, &modes)
                })?;
            }
        }
        Format::Json => {
            let mut mode_tables = serde_json::Map::new();
            for spec in specs {
                let modes = ModeSet::new(spec).map_err(numerical)?;
                let positive: Vec<_> = modes.modes().iter().filter(|m| m.j > 0).collect();
                mode_tables.insert(spec.family().name().into(), json!(positive));
            }
            let doc = json!({
                "config": cfg.to_json(),
                "infrared_limit": infrared,
                "rows": rows,
                "modes": mode_tables,
            });
            emit(out, "dispersion.json", stdout, |b| output::write_json(b, &doc))?;
        }
    }
    Ok(())
}

const EVOLVE_HEADER: [&str; 20] = [
    "family",
    "j",
    "omega0",
    "Omega",
    "resonance_offset",
    "tau",
    "t_f",
    "resonant",
    "re_alpha_analytic",
    "im_alpha_analytic",
    "re_beta_analytic",
    "im_beta_analytic",
    "N_analytic",
    "re_alpha_numeric",
    "im_alpha_numeric",
    "re_beta_numeric",
    "im_beta_numeric",
    "N_numeric",
    "max_wronskian_drift",
    "deviation",
];

struct Evolution {
    family: CircuitFamily,
    mode: i64,
    omega0: f64,
    drive: dynamics::DriveSpec,
    analytic: Option<BogoliubovResult>,
    numeric: Option<(BogoliubovResult, ModeTrajectory)>,
}

impl Evolution {
    /// `|N_num − N_ana| / N_ana`, or the absolute difference when `N_ana = 0`.
    fn deviation(&self) -> Option<f64> {
        let a = self.analytic?.particles();
        let n = self.numeric.as_ref()?.0.particles();
        Some(if a > 0.0 { (n - a).abs() / a } else { (n - a).abs() })
    }

    fn csv_record(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
        let coeffs = |r: Option<&BogoliubovResult>| {
            vec![
                opt(r.map(|r| r.alpha.re)),
                opt(r.map(|r| r.alpha.im)),
                opt(r.map(|r| r.beta.re)),
                opt(r.map(|r| r.beta.im)),
                opt(r.map(|r| r.particles())),
            ]
        };
        let mut rec = vec![
            self.family.name().to_string(),
            self.mode.to_string(),
            fmt_float(self.omega0),
            fmt_float(self.drive.omega()),
            fmt_float(dynamics::resonance_offset(&self.drive, self.omega0)),
            fmt_float(self.drive.tau()),
            fmt_float(self.drive.t_final()),
            dynamics::is_resonant(&self.drive, self.omega0).to_string(),
        ];
        rec.extend(coeffs(self.analytic.as_ref()));
        rec.extend(coeffs(self.numeric.as_ref().map(|(r, _)| r)));
        rec.push(opt(self.numeric.as_ref().map(|(_, t)| t.max_wronskian_drift())));
        rec.push(opt(self.deviation()));
        rec
    }

    fn to_json(&self, cfg: &RunConfig) -> Value {
        let traj = self.numeric.as_ref().map(|(_, t)| {
            json!({
                "t": t.times,
                "q": t.q.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                "q_dot": t.q_dot.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                "wronskian_drift": t.wronskian_drift,
                "accepted_steps": t.accepted_steps,
            })
        });
        json!({
            "config": cfg.to_json(),
            "family": self.family,
            "mode": self.mode,
            "omega0": self.omega0,
            "drive": self.drive,
            "resonance_offset": dynamics::resonance_offset(&self.drive, self.omega0),
            "resonant": dynamics::is_resonant(&self.drive, self.omega0),
            "analytic": self.analytic.map(|r| json!({ "result": r, "N": r.particles() })),
            "numeric": self.numeric.as_ref().map(|(r, t)| json!({
                "result": r,
                "N": r.particles(),
                "unitarity_residual": r.unitarity() - 1.0,
                "max_wronskian_drift": t.max_wronskian_drift(),
            })),
            "deviation": self.deviation(),
            "trajectory": traj,
        })
    }
}

fn cmd_evolve(
    cfg: &RunConfig,
    specs: &[CircuitSpec],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let method = cfg.run.method;
    let integ = cfg.run.integrator(cfg.drive.initial_condition);
    for spec in specs {
        let drive = cfg.drive.drive_for(spec).map_err(|e| Failure::Config(e.to_string()))?;
        if !drive.is_perturbative() {
            let _ = writeln!(
                stderr,
                "warning: η = {} exceeds {}; first-order multiscale results are unreliable",
                drive.eta(),
                dynamics::ETA_WARN
            );
        }
        let h = cfg.drive.target_mode(spec).map_err(|e| Failure::Config(e.to_string()))?;
        let omega0 = spec.omega0(h).map_err(numerical)?;
        let analytic = if method.analytic() {
            Some(dynamics::analytic_bogoliubov(spec, &drive, h).map_err(numerical)?)
        } else {
            None
        };
        let numeric = if method.numeric() {
            Some(dynamics::numeric_bogoliubov(spec, &drive, h, &integ).map_err(numerical)?)
        } else {
            None
        };
        let ev = Evolution { family: spec.family(), mode: h, omega0, drive, analytic, numeric };

        let fam = spec.family();
        match cfg.run.format {
            Format::Csv => {
                emit(&cfg.run.out, &format!("evolve_{fam}.csv"), stdout, |b| {
                    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(b);
                    w.write_record(EVOLVE_HEADER)?;
                    w.write_record(ev.csv_record())?;
                    w.flush()
                })?;
                if let Some((_, traj)) = &ev.numeric {
                    emit(&cfg.run.out, &format!("trajectory_{fam}_j{h}.csv"), stdout, |b| {
                        output::write_trajectory_csv(b, traj)
                    })?;
                }
            }
            Format::Json => {
                let doc = ev.to_json(cfg);
                emit(&cfg.run.out, &format!("evolve_{fam}.json"), stdout, |b| output::write_json(b, &doc))?;
            }
        }
        let mut line = format!("{fam} j={h}:");
        if let Some(a) = &ev.analytic {
            line.push_str(&format!(" N_analytic={}", fmt_float(a.particles())));
        }
        if let Some((n, _)) = &ev.numeric {
            line.push_str(&format!(" N_numeric={}", fmt_float(n.particles())));
        }
        if let Some(d) = ev.deviation() {
            line.push_str(&format!(" deviation={}", fmt_float(d)));
        }
        let _ = writeln!(stdout, "{line}");
    }
    Ok(())
}

fn sweep_methods(m: RunMethod) -> Vec<Method> {
    match m {
        RunMethod::Analytic => vec![Method::AnalyticMultiscale],
        RunMethod::Numeric => vec![Method::NumericOde],
        RunMethod::Both => vec![Method::AnalyticMultiscale, Method::NumericOde],
    }
}

fn cmd_sweep(cfg: &RunConfig, specs: &[CircuitSpec], stdout: &mut dyn Write) -> Result<(), Failure> {
    let opts = SweepOptions {
        methods: sweep_methods(cfg.run.method),
        eta: Some(cfg.drive.eta),
        integrator: cfg.run.integrator(cfg.drive.initial_condition),
        numeric_mode_cap: cfg.run.numeric_mode_cap,
        threads: None,
    };
    let results = observables::sweep_spectrum(specs, cfg.drive.tau(), &opts).map_err(|e| match e {
        observables::ObservableError::BadThreadCount(_) | observables::ObservableError::MissingEta => {
            Failure::Config(e.to_string())
        }
        other => numerical(other),
    })?;
    for r in &results {
        let fam = r.family;
        match cfg.run.format {
            Format::Csv => {
                emit(&cfg.run.out, &format!("sweep_{fam}.csv"), stdout, |b| output::write_sweep_csv(b, r))?;
            }
            Format::Json => {
                let doc = json!({
                    "config": cfg.to_json(),
                    "family": fam,
                    "tau": r.tau,
                    "monotonicity": r.trends,
                    "numeric_truncated_at": r.numeric_truncated_at,
                    "rows": r.rows,
                });
                emit(&cfg.run.out, &format!("sweep_{fam}.json"), stdout, |b| output::write_json(b, &doc))?;
            }
        }
        for t in &r.trends {
            let _ = writeln!(
                stdout,
                "{fam} {}: N_j {:?} (expected {:?}){}",
                t.method.name(),
                t.observed,
                t.expected,
                if t.matches { "" } else { " MISMATCH" }
            );
        }
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, perturb_chi: Option<f64>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let opts = VerifyOptions {
        rtol: cfg.run.rtol,
        atol: cfg.run.atol,
        chi_perturbation: perturb_chi,
        ..VerifyOptions::default()
    };
    let results = verify::run_checks(&cfg.circuit, &opts).map_err(numerical)?;
    for r in &results {
        let _ = writeln!(stdout, "{r}");
    }
    if cfg.run.format == Format::Json {
        let doc = json!({ "config": cfg.to_json(), "checks": results });
        emit(&cfg.run.out, "verify.json", stdout, |b| output::write_json(b, &doc))?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(stdout, "{} of {} checks passed", results.len() - failed, results.len());
    if failed > 0 {
        return Err(Failure::Verification(failed));
    }
    Ok(())
}
