//! Experiment configuration in TOML.
//!
//! ```toml
//! [model]
//! dimension = 1        # spatial dimension d
//! mass = 16.0          # m >= 0
//! n_max = 8            # total occupation cap
//! seed = 42
//! max_dimension = 4000000
//!
//! [grid]               # kind = "uniform" { cutoff, points } | "explicit" { modes, weights }
//! kind = "uniform"
//! cutoff = 3.0
//! points = 3
//!
//! [chi_b]              # kind = "indicator" { center, radius }
//! kind = "indicator"   #      | "gaussian" { center, sigma, amplitude }
//! radius = 10.0        #      | "tabulated" { file | points }
//!
//! [chi_i]
//! kind = "indicator"
//! radius = 1.0
//!
//! [quadrature]         # rule = "trapezoid" | "simpson" { nodes } | "explicit" { points, weights }
//! rule = "trapezoid"
//! nodes = 9
//!
//! [coupling]
//! kappa = 0.05                 # used by `solve`
//! kappa_list = [0.2, 0.1]      # used by `sweep`, strictly decreasing
//!
//! [solver]
//! eig_tol = 1e-10
//! lin_tol = 1e-12
//! max_iter = 20000
//! krylov_dim = 200
//!
//! [epsilon]            # policy = "optimized" | "fixed" { value }
//! policy = "optimized"
//!
//! [output]
//! dir = "out"
//! dump_vectors = false
//! ```
//!
//! Every section except `[model]`, `[grid]`, `[chi_b]`, `[chi_i]` and
//! `[quadrature]` may be omitted. Unknown keys are rejected. Table files are
//! resolved relative to the directory of the config file and inlined, so the
//! echoed config is self-contained.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::DEFAULT_MAX_DIMENSION;
use crate::grid::{CutoffSpec, GridSpec, QuadratureSpec};
use crate::spectral::EigenOptions;
use crate::theory::EpsilonPolicy;
use crate::verify::SweepSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub model: ModelSection,
    pub grid: GridSpec,
    pub chi_b: CutoffSpec,
    pub chi_i: CutoffSpec,
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub epsilon: EpsilonPolicy,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub dimension: usize,
    pub mass: f64,
    pub n_max: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_dimension")]
    pub max_dimension: usize,
}

fn default_max_dimension() -> usize {
    DEFAULT_MAX_DIMENSION
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub kappa_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub eig_tol: f64,
    pub lin_tol: f64,
    pub max_iter: usize,
    pub krylov_dim: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            eig_tol: 1e-10,
            lin_tol: 1e-12,
            max_iter: 20_000,
            krylov_dim: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub dump_vectors: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            dump_vectors: false,
        }
    }
}

impl ModelParams {
    /// Reads, resolves and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses TOML text; table files resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut params: ModelParams = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map_or_else(|| "<toml>".to_string(), |s| locate(text, s.start));
            Error::config(field, e.message().trim().to_string())
        })?;
        params.resolve(base)?;
        params.validate()?;
        Ok(params)
    }

    fn resolve(&mut self, base: &Path) -> Result<()> {
        let map = |field: &'static str| move |e: Error| Error::config(field, e.to_string());
        self.chi_b.resolve(base).map_err(map("chi_b.file"))?;
        self.chi_i.resolve(base).map_err(map("chi_i.file"))?;
        Ok(())
    }

    /// Checks every field that can be checked without building the model.
    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.dimension == 0 {
            return Err(Error::config("model.dimension", "must be at least 1"));
        }
        if !(m.mass >= 0.0 && m.mass.is_finite()) {
            return Err(Error::config(
                "model.mass",
                format!("must be finite and >= 0, got {}", m.mass),
            ));
        }
        if m.n_max > u8::MAX as usize {
            return Err(Error::config(
                "model.n_max",
                format!("must be at most 255, got {}", m.n_max),
            ));
        }
        if m.max_dimension == 0 {
            return Err(Error::config("model.max_dimension", "must be positive"));
        }
        match &self.grid {
            GridSpec::Uniform { cutoff, points } => {
                if !(*cutoff > 0.0 && cutoff.is_finite()) {
                    return Err(Error::config(
                        "grid.cutoff",
                        format!("must be finite and > 0, got {cutoff}"),
                    ));
                }
                if *points == 0 {
                    return Err(Error::config("grid.points", "must be at least 1"));
                }
            }
            GridSpec::Explicit { modes, weights } => {
                if modes.len() != weights.len() {
                    return Err(Error::config(
                        "grid.weights",
                        format!("{} weights for {} modes", weights.len(), modes.len()),
                    ));
                }
                if let Some(k) = modes.iter().position(|k| k.len() != m.dimension) {
                    return Err(Error::config(
                        format!("grid.modes[{k}]"),
                        format!(
                            "expected {} coordinates, found {}",
                            m.dimension,
                            modes[k].len()
                        ),
                    ));
                }
            }
        }
        self.chi_b
            .validate()
            .map_err(|e| Error::config("chi_b", e.to_string()))?;
        self.chi_i
            .validate()
            .map_err(|e| Error::config("chi_i", e.to_string()))?;
        match &self.quadrature {
            QuadratureSpec::Trapezoid { nodes } | QuadratureSpec::Simpson { nodes } => {
                if *nodes == 0 {
                    return Err(Error::config("quadrature.nodes", "must be at least 1"));
                }
                if matches!(self.quadrature, QuadratureSpec::Simpson { .. }) && nodes % 2 == 0 {
                    return Err(Error::config(
                        "quadrature.nodes",
                        format!("simpson needs an odd count, got {nodes}"),
                    ));
                }
            }
            QuadratureSpec::Explicit { points, weights } => {
                if points.len() != weights.len() {
                    return Err(Error::config(
                        "quadrature.weights",
                        format!("{} weights for {} points", weights.len(), points.len()),
                    ));
                }
            }
        }
        let c = &self.coupling;
        if !(c.kappa >= 0.0 && c.kappa.is_finite()) {
            return Err(Error::config(
                "coupling.kappa",
                format!("must be finite and >= 0, got {}", c.kappa),
            ));
        }
        if let Some(i) = c
            .kappa_list
            .iter()
            .position(|k| !(*k >= 0.0 && k.is_finite()))
        {
            return Err(Error::config(
                format!("coupling.kappa_list[{i}]"),
                format!("must be finite and >= 0, got {}", c.kappa_list[i]),
            ));
        }
        if let Some(i) = c.kappa_list.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::config(
                format!("coupling.kappa_list[{}]", i + 1),
                "values must be strictly decreasing",
            ));
        }
        let s = &self.solver;
        for (field, v) in [("solver.eig_tol", s.eig_tol), ("solver.lin_tol", s.lin_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    field,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        if s.max_iter == 0 {
            return Err(Error::config("solver.max_iter", "must be positive"));
        }
        if s.krylov_dim < 2 {
            return Err(Error::config("solver.krylov_dim", "must be at least 2"));
        }
        if let EpsilonPolicy::Fixed { value } = self.epsilon {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::config(
                    "epsilon.value",
                    format!("must be finite and > 0, got {value}"),
                ));
            }
        }
        Ok(())
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            tol: self.solver.eig_tol,
            max_iter: self.solver.max_iter,
            krylov_dim: self.solver.krylov_dim,
            seed: self.model.seed,
            ..EigenOptions::default()
        }
    }

    pub fn sweep_settings(&self) -> SweepSettings {
        SweepSettings {
            eig: self.eigen_options(),
            lin_tol: self.solver.lin_tol,
            epsilon: self.epsilon,
        }
    }

    /// The resolved config as TOML; parsing it back gives an equal value.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

/// `line L, column C` for a byte offset, used when the parser cannot name a key.
fn locate(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    let section = before.lines().rev().find_map(|l| {
        l.trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .map(str::to_string)
    });
    match section {
        Some(s) => format!("[{s}] line {line}, column {column}"),
        None => format!("line {line}, column {column}"),
    }
}
