//! CSV tables. Floats are written with 17 significant digits so that reading
//! a file back reproduces the computed values exactly.

use std::path::Path;

use polref::{ScatteringSolution, SpinProbabilities};

use crate::error::CliError;

pub const SCATTERING_HEADER: [&str; 10] = ["k", "R_pp", "R_pm", "R_mp", "R_mm", "T_pp", "T_pm", "T_mp", "T_mm", "flux_sum"];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One k-point of a scattering scan. Probability suffixes read `(out, in)`,
/// so `R_pm` is reflection of incident `|−⟩` into `|+⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRow {
    pub k: f64,
    pub r: SpinProbabilities,
    pub t: SpinProbabilities,
}

impl ScatteringRow {
    pub fn from_solution(sol: &ScatteringSolution) -> Self {
        Self { k: sol.k, r: sol.reflection_probabilities(), t: sol.transmission_probabilities() }
    }

    /// Outgoing probability averaged over the two incident spins; 1 without absorption.
    pub fn flux_sum(&self) -> f64 {
        let total: f64 = self.r.p.iter().chain(&self.t.p).flatten().sum();
        0.5 * total
    }

    pub fn values(&self) -> [f64; 10] {
        let (r, t) = (&self.r, &self.t);
        [self.k, r.pp(), r.pm(), r.mp(), r.mm(), t.pp(), t.pm(), t.mp(), t.mm(), self.flux_sum()]
    }

    fn from_values(v: &[f64]) -> Self {
        let probs = |a: &[f64]| SpinProbabilities { p: [[a[0], a[1]], [a[2], a[3]]] };
        Self { k: v[0], r: probs(&v[1..5]), t: probs(&v[5..9]) }
    }
}

pub fn write_table<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.as_ref().iter().map(|&x| format_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scattering(path: &Path, rows: &[ScatteringRow]) -> Result<(), CliError> {
    write_table(path, &SCATTERING_HEADER, rows.iter().map(ScatteringRow::values))
}

pub fn read_header(path: &Path) -> Result<Vec<String>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.headers()?.iter().map(|h| h.trim().to_string()).collect())
}

/// Reads back a table written by [`write_table`].
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| CliError::Validation(format!("{}: `{f}`: {e}", path.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn read_scattering(path: &Path) -> Result<Vec<ScatteringRow>, CliError> {
    let (header, rows) = read_table(path)?;
    if header != SCATTERING_HEADER {
        return Err(CliError::HeaderMismatch {
            path: path.into(),
            layout: "scattering".into(),
            missing: SCATTERING_HEADER.iter().filter(|h| !header.iter().any(|x| x == *h)).map(|h| h.to_string()).collect(),
        });
    }
    Ok(rows.iter().map(|v| ScatteringRow::from_values(v)).collect())
}
