//! Machine-readable outputs: the sweep CSV, the JSON report and vector dumps.
//!
//! The CSV has the columns of [`CSV_COLUMNS`] in that order, one row per
//! coupling in decreasing order, every number written as `{:.16e}` (17
//! significant digits). The JSON report carries the resolved config, the
//! crate version, the seed, all constants, every check outcome and the sweep
//! rows. Neither contains timestamps or host data, so identical inputs give
//! byte-identical files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::fock::{write_binary, FockBasis, FockVector};
use crate::grid::{ModeGrid, SpatialQuadrature};
use crate::spectral::{SpectralResult, SpectralWarning};
use crate::theory::{first_order_coefficient, hbound_constants, CutoffNorms, TheoryConstants};
use crate::verify::{CheckOutcome, SweepReport, SweepRow, CSV_COLUMNS};
use crate::{Error, Result};

pub const CSV_FILE: &str = "sweep.csv";
pub const REPORT_FILE: &str = "report.json";

/// Seventeen significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.csv_values().iter().map(|&x| format_number(x)).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Quantities available without solving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelInfo {
    pub dimension: usize,
    pub modes: usize,
    pub n_max: usize,
    pub quadrature_nodes: usize,
    pub min_omega: f64,
    pub norms: CutoffNorms,
    pub c_bos: f64,
    pub d_bos: f64,
    pub c1: f64,
    pub reflection_symmetric: bool,
}

impl ModelInfo {
    pub fn new(basis: &FockBasis, grid: &ModeGrid, quad: &SpatialQuadrature) -> Self {
        let (c_bos, d_bos) = hbound_constants(grid, quad);
        ModelInfo {
            dimension: basis.dim(),
            modes: basis.modes(),
            n_max: basis.n_max(),
            quadrature_nodes: quad.len(),
            min_omega: grid.min_omega(),
            norms: CutoffNorms::new(grid, quad),
            c_bos,
            d_bos,
            c1: first_order_coefficient(grid, quad),
            reflection_symmetric: grid.is_reflection_symmetric(),
        }
    }
}

/// A ground state without its vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub kappa: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub gap_estimate: f64,
    pub top_grade_weight: f64,
    pub overlap: f64,
    pub warnings: Vec<SpectralWarning>,
}

impl StateSummary {
    pub fn new(kappa: f64, s: &SpectralResult) -> Self {
        StateSummary {
            kappa,
            energy: s.energy,
            residual: s.residual,
            iterations: s.iterations,
            gap_estimate: s.gap_estimate,
            top_grade_weight: s.top_grade_weight,
            overlap: s.ground_vector[0].norm(),
            warnings: s.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// Resolved config as TOML.
    pub config: String,
    pub info: ModelInfo,
    pub constants: Option<TheoryConstants>,
    pub state: Option<StateSummary>,
    pub sweep: Option<SweepReport>,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, config: String, info: ModelInfo) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config,
            info,
            constants: None,
            state: None,
            sweep: None,
            checks: Vec::new(),
            passed: true,
        }
    }

    /// Every check, including those inside the sweep.
    pub fn all_checks(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks
            .iter()
            .chain(self.sweep.iter().flat_map(|s| s.checks.iter()))
    }

    pub fn finish(&mut self) {
        self.passed = !self.all_checks().any(|c| c.status.is_failure())
            && !self.sweep.as_ref().is_some_and(SweepReport::degraded);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes `report.json`, and `sweep.csv` when the report holds a sweep.
pub fn write_outputs(dir: &Path, report: &RunReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if let Some(sweep) = &report.sweep {
        let path = dir.join(CSV_FILE);
        let mut w = BufWriter::new(File::create(&path)?);
        write_csv(&mut w, &sweep.rows)?;
        w.flush()?;
        written.push(path);
    }
    let path = dir.join(REPORT_FILE);
    fs::write(&path, report.to_json())?;
    written.push(path);
    Ok(written)
}

/// Dumps a vector in the binary Fock format as `ground_kappa_<index>.bin`.
pub fn dump_vector(dir: &Path, index: usize, basis: &FockBasis, v: &FockVector) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("ground_kappa_{index}.bin"));
    let mut w = BufWriter::new(File::create(&path)?);
    write_binary(&mut w, basis, v)?;
    w.flush()?;
    Ok(path)
}

/// Human-readable rendering of a stored `report.json`, followed by the sweep
/// CSV rebuilt from the stored rows.
pub fn render_stored(text: &str) -> Result<String> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("report.json: {e}")))?;
    let mut out = String::new();
    let str_of = |v: &Value| v.as_str().map_or_else(|| v.to_string(), str::to_string);
    out.push_str(&format!(
        "{} {} `{}`, seed {}\n",
        str_of(&v["tool"]),
        str_of(&v["version"]),
        str_of(&v["command"]),
        v["seed"]
    ));
    let mut checks: Vec<&Value> = v["checks"]
        .as_array()
        .map(|a| a.iter().collect())
        .unwrap_or_default();
    checks.extend(v["sweep"]["checks"].as_array().into_iter().flatten());
    for c in checks {
        out.push_str(&format!(
            "{:<32} {:<13} measured {:>11}  threshold {:>10}  {}\n",
            str_of(&c["name"]),
            str_of(&c["status"]),
            number_of(&c["measured"]).map_or("-".into(), |x| format!("{x:.3e}")),
            number_of(&c["threshold"]).map_or("-".into(), |x| format!("{x:.3e}")),
            str_of(&c["detail"]),
        ));
    }
    if let Some(rows) = v["sweep"]["rows"].as_array() {
        out.push_str(&CSV_COLUMNS.join(","));
        out.push('\n');
        for row in rows {
            let fields: Vec<String> = CSV_COLUMNS
                .iter()
                .map(|c| format_number(number_of(&row[*c]).unwrap_or(f64::NAN)))
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    out.push_str(&format!(
        "overall: {}\n",
        if v["passed"].as_bool() == Some(true) {
            "pass"
        } else {
            "FAIL"
        }
    ));
    Ok(out)
}

fn number_of(v: &Value) -> Option<f64> {
    v.as_f64()
}
