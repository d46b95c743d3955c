//! Lexer for unit-suffixed quantities such as `"0.4 pF"` or `"1.25 μA"`.
//!
//! Every dimensioned value in a run configuration must carry its unit.
//! Quantities are converted to SI on ingest and never leave the crate in
//! engineering units.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Capacitance,
    Inductance,
    Current,
    Time,
    Length,
    /// Angular frequency in rad/s. `Hz` inputs are converted with `2π`.
    AngularFrequency,
}

impl Dimension {
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Capacitance => "F",
            Dimension::Inductance => "H",
            Dimension::Current => "A",
            Dimension::Time => "s",
            Dimension::Length => "m",
            Dimension::AngularFrequency => "rad/s",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Capacitance => "capacitance",
            Dimension::Inductance => "inductance",
            Dimension::Current => "current",
            Dimension::Time => "time",
            Dimension::Length => "length",
            Dimension::AngularFrequency => "angular frequency",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("'{input}' has no unit suffix (expected a {dimension} such as '1 {unit}')")]
    MissingUnit {
        input: String,
        dimension: Dimension,
        unit: &'static str,
    },
    #[error("'{input}' is not a number followed by a unit")]
    BadNumber { input: String },
    #[error("unit '{unit}' in '{input}' is not a {dimension} unit")]
    WrongUnit {
        input: String,
        unit: String,
        dimension: Dimension,
    },
}

fn prefix_scale(prefix: &str) -> Option<f64> {
    Some(match prefix {
        "" => 1.0,
        "f" => 1e-15,
        "p" => 1e-12,
        "n" => 1e-9,
        "u" | "μ" | "µ" => 1e-6,
        "m" => 1e-3,
        "k" => 1e3,
        "M" => 1e6,
        "G" => 1e9,
        "T" => 1e12,
        _ => return None,
    })
}

/// Splits `unit` into (SI prefix scale, base unit) for the requested dimension.
fn resolve_unit(unit: &str, dimension: Dimension) -> Option<f64> {
    let bases: &[(&str, f64)] = match dimension {
        Dimension::Capacitance => &[("F", 1.0)],
        Dimension::Inductance => &[("H", 1.0)],
        Dimension::Current => &[("A", 1.0)],
        Dimension::Time => &[("s", 1.0)],
        Dimension::Length => &[("m", 1.0)],
        Dimension::AngularFrequency => &[("rad/s", 1.0), ("Hz", 2.0 * PI)],
    };
    for &(base, factor) in bases {
        if let Some(prefix) = unit.strip_suffix(base) {
            // "m" alone is metres, not milli-nothing
            if let Some(scale) = prefix_scale(prefix) {
                return Some(scale * factor);
            }
        }
    }
    None
}

/// Parses a quantity like `"60 pH"` into SI units of `dimension`.
pub fn parse_quantity(input: &str, dimension: Dimension) -> Result<f64, UnitError> {
    let trimmed = input.trim();
    let split = trimmed
        .char_indices()
        .find(|&(i, c)| {
            // exponent markers belong to the number: "1e-12 s"
            let is_number_char = c.is_ascii_digit() || matches!(c, '.' | '+' | '-');
            let is_exponent = (c == 'e' || c == 'E')
                && trimmed[i + 1..]
                    .chars()
                    .next()
                    .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+');
            !(is_number_char || is_exponent)
        })
        .map(|(i, _)| i)
        .unwrap_or(trimmed.len());
    let (number, unit) = trimmed.split_at(split);
    let value: f64 = number.trim().parse().map_err(|_| UnitError::BadNumber {
        input: input.to_string(),
    })?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(UnitError::MissingUnit {
            input: input.to_string(),
            dimension,
            unit: dimension.si_unit(),
        });
    }
    let scale = resolve_unit(unit, dimension).ok_or_else(|| UnitError::WrongUnit {
        input: input.to_string(),
        unit: unit.to_string(),
        dimension,
    })?;
    Ok(value * scale)
}

/// Formats an SI value with its base unit so that [`parse_quantity`] reads it back exactly.
pub fn format_si(value: f64, dimension: Dimension) -> String {
    format!("{value:e} {}", dimension.si_unit())
}
