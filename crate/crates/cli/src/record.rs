//! Result records and their CSV / JSON encodings.
//!
//! JSON floats use the shortest representation that parses back to the same
//! bits, so `serde_json::from_str(&to_json(r))` reproduces `r` exactly. CSV
//! floats use `{:.16e}` (17 significant digits), which also round-trips.

use std::io::Write;

use ncdirac::Error;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, RunConfig};
use crate::run::Payload;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Validation,
    SeriesDivergence,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Internal => 1,
            ErrorKind::Validation | ErrorKind::SeriesDivergence => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::SeriesDivergence { .. } => ErrorKind::SeriesDivergence,
            Error::InvalidParameter { .. } | Error::Dimension(_) | Error::TagMismatch | Error::AlreadyShifted => {
                ErrorKind::Validation
            }
            Error::NotHermitian { .. } | Error::Singular | Error::LevelTracking(_) | Error::Numerical(_) => {
                ErrorKind::Internal
            }
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<&ConfigError> for ErrorRecord {
    fn from(e: &ConfigError) -> Self {
        Self { kind: ErrorKind::Validation, message: e.to_string() }
    }
}

/// Everything one invocation produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub config: RunConfig,
    pub version: String,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
    pub payload: Option<Payload>,
    pub error: Option<ErrorRecord>,
}

pub fn to_json(r: &ResultRecord) -> String {
    serde_json::to_string_pretty(r).expect("records contain only finite floats and string keys")
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes the payload's table. The header is always written, even for an
/// empty table.
pub fn write_csv<W: Write>(payload: &Payload, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match payload {
        Payload::AlgebraCheck { rows } => {
            w.write_record(["check", "residual"])?;
            for r in rows {
                w.write_record([r.check.clone(), num(r.residual)])?;
            }
        }
        Payload::NcAlgebra { rows } => {
            w.write_record(["theta", "eta", "relation", "residual"])?;
            for r in rows {
                w.write_record([num(r.theta), num(r.eta), r.relation.clone(), num(r.residual)])?;
            }
        }
        Payload::Landau { rows, .. } => {
            w.write_record(["hamiltonian", "level", "energy", "multiplicity", "oracle", "rel_err"])?;
            for r in rows {
                w.write_record([
                    r.hamiltonian.clone(),
                    r.level.to_string(),
                    num(r.energy),
                    r.multiplicity.to_string(),
                    num(r.oracle),
                    num(r.rel_err),
                ])?;
            }
        }
        Payload::Convergence { rows, .. } => {
            w.write_record(["c", "level", "E_dirac_minus_rest", "E_pauli", "abs_err"])?;
            for r in rows {
                w.write_record([num(r.c), r.level.to_string(), num(r.e_dirac_minus_rest), num(r.e_pauli), num(r.abs_err)])?;
            }
        }
        Payload::NcSweep { rows, .. } => {
            w.write_record(["theta", "eta", "hamiltonian", "level", "energy", "shift"])?;
            for r in rows {
                w.write_record([num(r.theta), num(r.eta), r.hamiltonian.clone(), r.level.to_string(), num(r.energy), num(r.shift)])?;
            }
        }
        Payload::Series { rows, .. } => {
            w.write_record(["order", "spectral_distance", "matrix_distance", "ratio"])?;
            for r in rows {
                w.write_record([r.order.to_string(), num(r.spectral_distance), num(r.matrix_distance), opt(r.ratio)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::CheckRow;

    #[test]
    fn csv_uses_seventeen_digits() {
        let p = Payload::AlgebraCheck { rows: vec![CheckRow { check: "x".into(), residual: 0.1 }] };
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "check,residual\nx,1.0000000000000001e-1\n");
        let back: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back.to_bits(), 0.1f64.to_bits());
    }

    #[test]
    fn empty_table_has_header() {
        let p = Payload::Landau { cyclotron_frequency: 1.0, rows: vec![] };
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "hamiltonian,level,energy,multiplicity,oracle,rel_err\n");
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let div = ErrorRecord::from(&Error::SeriesDivergence { spectral_radius: 1.5 });
        assert_eq!(div.kind.exit_code(), 2);
        assert!(div.message.contains("series divergence"));
        assert_eq!(ErrorRecord::from(&Error::Singular).kind.exit_code(), 1);
    }
}
