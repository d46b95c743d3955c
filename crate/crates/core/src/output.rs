//! CSV and JSON emitters with fixed headers and float formatting.
//!
//! Every float goes through [`fmt_float`] (scientific, 12 significant
//! digits), so identical inputs produce byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::ModeTrajectory;
use crate::observables::{DispersionRow, SweepResult};
use crate::quantization::ModeSet;

pub const SWEEP_HEADER: [&str; 9] = [
    "family",
    "j",
    "omega0",
    "epsilon_over_hbar",
    "Omega",
    "N",
    "log10N",
    "E_over_hbar",
    "method",
];
pub const DISPERSION_HEADER: [&str; 5] = ["family", "j", "k_dx", "omega0", "epsilon_over_hbar"];
pub const MODE_TABLE_HEADER: [&str; 6] = ["j", "k", "omega0", "chi", "epsilon_over_hbar", "amp_norm"];
pub const TRAJECTORY_HEADER: [&str; 6] = ["t", "re_Q", "im_Q", "re_Qdot", "im_Qdot", "wronskian_drift"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Scientific notation with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> io::Result<()> {
    w.flush()
}

pub fn write_sweep_csv<W: Write>(w: W, result: &SweepResult) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        out.write_record([
            result.family.name().to_string(),
            r.j.to_string(),
            fmt_float(r.omega0),
            fmt_float(r.epsilon_over_hbar),
            fmt_float(r.omega_drive),
            fmt_float(r.n),
            fmt_float(r.log10_n),
            fmt_float(r.e_over_hbar),
            r.method.name().to_string(),
        ])?;
    }
    finish(out)
}

pub fn write_dispersion_csv<W: Write>(w: W, rows: &[DispersionRow]) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(DISPERSION_HEADER)?;
    for r in rows {
        out.write_record([
            r.family.name().to_string(),
            r.j.to_string(),
            fmt_float(r.k_dx),
            fmt_float(r.omega0),
            r.epsilon_over_hbar.map(fmt_float).unwrap_or_default(),
        ])?;
    }
    finish(out)
}

/// Positive-branch mode table of `modes`.
pub fn write_mode_table_csv<W: Write>(w: W, modes: &ModeSet) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(MODE_TABLE_HEADER)?;
    for m in modes.modes().iter().filter(|m| m.j > 0) {
        out.write_record([
            m.j.to_string(),
            fmt_float(m.k),
            fmt_float(m.omega0),
            fmt_float(m.chi),
            fmt_float(m.epsilon / crate::constants::HBAR),
            fmt_float(m.amp_norm),
        ])?;
    }
    finish(out)
}

/// Trajectory dump; `Q` and `Qdot` are the dimensionless `q = √(2ω0)Q` and `dq/d(ω0 t)`.
pub fn write_trajectory_csv<W: Write>(w: W, traj: &ModeTrajectory) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(TRAJECTORY_HEADER)?;
    for i in 0..traj.times.len() {
        out.write_record([
            fmt_float(traj.times[i]),
            fmt_float(traj.q[i].re),
            fmt_float(traj.q[i].im),
            fmt_float(traj.q_dot[i].re),
            fmt_float(traj.q_dot[i].im),
            fmt_float(traj.wronskian_drift[i]),
        ])?;
    }
    finish(out)
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// Creates `dir` if needed and returns `dir/name`.
pub fn output_path(dir: &Path, name: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

/// Writes the bytes produced by `emit` to `path` in one go.
pub fn write_file<F>(path: &Path, emit: F) -> io::Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
{
    let mut buf = Vec::new();
    emit(&mut buf)?;
    fs::write(path, buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CircuitFamily, CircuitSpec};
    use crate::observables::{dispersion_table, sweep_spectrum, SweepOptions};

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-2.5e-13), "-2.50000000000e-13");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(1.081_727_432_905_58e12), "1.08172743291e12");
    }

    #[test]
    fn sweep_header_is_exact() {
        let spec = CircuitSpec::reference(CircuitFamily::Rhtl2).with_cells(8).unwrap();
        let out = sweep_spectrum(&[spec], 1e-12, &SweepOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &out[0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "family,j,omega0,epsilon_over_hbar,Omega,N,log10N,E_over_hbar,method"
        );
        assert_eq!(lines.count(), 4);
        assert!(text.ends_with("analytic\n"));
    }

    #[test]
    fn dispersion_and_mode_headers() {
        let spec = CircuitSpec::reference(CircuitFamily::Lhtl1).with_cells(8).unwrap();
        let mut buf = Vec::new();
        write_dispersion_csv(&mut buf, &dispersion_table(std::slice::from_ref(&spec), true).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,j,k_dx,omega0,epsilon_over_hbar\nLHTL1,1,"));

        let mut buf = Vec::new();
        write_mode_table_csv(&mut buf, &ModeSet::new(&spec).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("j,k,omega0,chi,epsilon_over_hbar,amp_norm\n1,"));
        assert_eq!(text.lines().count(), 5);
    }
}
