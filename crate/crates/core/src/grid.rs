//! Momentum grid, cutoff profiles and the spatial quadrature for the
//! interaction.
//!
//! Every continuum norm of a cutoff is replaced by its discrete counterpart
//! over the grid cells: `||g||^2 = sum_i w_i |g(k_i)|^2`. The same weights
//! enter the smeared ladder operators (see [`crate::fock`]), so the discrete
//! canonical commutation relations reproduce this inner product exactly.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Gaussian cutoffs are cut at this many standard deviations for quadrature.
pub const GAUSSIAN_TRUNCATION_SIGMAS: f64 = 6.0;

/// A real profile on momentum or position space.
///
/// `center` is broadcast to every axis. For `tabulated`, the table is read
/// along the single coordinate when d = 1 and along |x| otherwise, with
/// linear interpolation inside the table range and 0 outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CutoffSpec {
    Indicator {
        #[serde(default)]
        center: f64,
        radius: f64,
    },
    Gaussian {
        #[serde(default)]
        center: f64,
        sigma: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
        #[serde(default)]
        points: Vec<[f64; 2]>,
    },
}

fn unit() -> f64 {
    1.0
}

impl CutoffSpec {
    pub fn indicator(center: f64, radius: f64) -> Self {
        CutoffSpec::Indicator { center, radius }
    }

    pub fn gaussian(center: f64, sigma: f64, amplitude: f64) -> Self {
        CutoffSpec::Gaussian {
            center,
            sigma,
            amplitude,
        }
    }

    pub fn tabulated(points: Vec<[f64; 2]>) -> Self {
        CutoffSpec::Tabulated { file: None, points }
    }

    /// Loads a `file` reference into inline points so the spec becomes
    /// self-contained. Relative paths resolve against `base`.
    pub fn resolve(&mut self, base: &Path) -> Result<()> {
        if let CutoffSpec::Tabulated { file, points } = self {
            if let Some(name) = file.take() {
                let path = base.join(&name);
                let text = fs::read_to_string(&path).map_err(|e| {
                    Error::InvalidCutoff(format!("cannot read table {}: {e}", path.display()))
                })?;
                *points = parse_table(&text)?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCutoff(msg));
        match *self {
            CutoffSpec::Indicator { center, radius } => {
                if !center.is_finite() || !radius.is_finite() || radius < 0.0 {
                    return bad(format!(
                        "indicator needs finite center and radius >= 0, got {center}, {radius}"
                    ));
                }
            }
            CutoffSpec::Gaussian {
                center,
                sigma,
                amplitude,
            } => {
                if !center.is_finite()
                    || !amplitude.is_finite()
                    || !(sigma > 0.0 && sigma.is_finite())
                {
                    return bad(format!(
                        "gaussian needs finite center/amplitude and sigma > 0, got {center}, {amplitude}, {sigma}"
                    ));
                }
            }
            CutoffSpec::Tabulated {
                ref file,
                ref points,
            } => {
                if let Some(f) = file {
                    return bad(format!("table file {f} has not been loaded"));
                }
                if points.is_empty() {
                    return bad("tabulated cutoff has no points".into());
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("tabulated cutoff has a non-finite entry".into());
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return bad("tabulated points must be strictly increasing".into());
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            CutoffSpec::Indicator { center, radius } => {
                if distance_sq(x, center) <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffSpec::Gaussian {
                center,
                sigma,
                amplitude,
            } => amplitude * (-distance_sq(x, center) / (2.0 * sigma * sigma)).exp(),
            CutoffSpec::Tabulated { ref points, .. } => {
                let t = if x.len() == 1 {
                    x[0]
                } else {
                    distance_sq(x, 0.0).sqrt()
                };
                interpolate(points, t)
            }
        }
    }

    /// Axis-aligned box `[lo, hi]` (per axis) holding the support or, for
    /// gaussians, the truncated effective support.
    fn support(&self, dimension: usize) -> (f64, f64) {
        match *self {
            CutoffSpec::Indicator { center, radius } => (center - radius, center + radius),
            CutoffSpec::Gaussian { center, sigma, .. } => {
                let half = GAUSSIAN_TRUNCATION_SIGMAS * sigma;
                (center - half, center + half)
            }
            CutoffSpec::Tabulated { ref points, .. } => {
                let lo = points.first().map_or(0.0, |p| p[0]);
                let hi = points.last().map_or(0.0, |p| p[0]);
                if dimension == 1 {
                    (lo, hi)
                } else {
                    let r = lo.abs().max(hi.abs());
                    (-r, r)
                }
            }
        }
    }

    /// Mass of the integral lost to truncating a gaussian to its box.
    fn truncation_error(&self, dimension: usize) -> f64 {
        match *self {
            CutoffSpec::Gaussian {
                sigma, amplitude, ..
            } => {
                let full = amplitude.abs()
                    * (sigma * (2.0 * std::f64::consts::PI).sqrt()).powi(dimension as i32);
                let kept = erf(GAUSSIAN_TRUNCATION_SIGMAS / std::f64::consts::SQRT_2)
                    .powi(dimension as i32);
                full * (1.0 - kept)
            }
            _ => 0.0,
        }
    }
}

fn distance_sq(x: &[f64], center: f64) -> f64 {
    x.iter().map(|&c| (c - center) * (c - center)).sum()
}

fn interpolate(points: &[[f64; 2]], t: f64) -> f64 {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return 0.0,
    };
    if t < first[0] || t > last[0] {
        return 0.0;
    }
    let upper = points.partition_point(|p| p[0] < t);
    if upper == 0 {
        return first[1];
    }
    let [x1, y1] = points[upper];
    let [x0, y0] = points[upper - 1];
    if t == x1 {
        return y1;
    }
    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
}

/// Parses a whitespace-separated two-column table. `#` starts a comment.
pub fn parse_table(text: &str) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(Error::Format(format!(
                "table line {}: expected 2 columns, found {}",
                lineno + 1,
                cols.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Format(format!("table line {}: {s:?}: {e}", lineno + 1)))
        };
        out.push([parse(cols[0])?, parse(cols[1])?]);
    }
    Ok(out)
}

/// How the momentum modes are laid out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GridSpec {
    /// `points` cell centres per axis on `[-cutoff, cutoff]`, weight `(2 cutoff / points)^d`.
    Uniform { cutoff: f64, points: usize },
    Explicit {
        modes: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    dimension: usize,
    mass: f64,
    modes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    omega: Vec<f64>,
    chi_b: Vec<f64>,
    rho: Vec<f64>,
}

impl ModeGrid {
    pub fn build(dimension: usize, mass: f64, spec: &GridSpec, chi_b: &CutoffSpec) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("model.dimension", "must be at least 1"));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::config(
                "model.mass",
                format!("must be finite and >= 0, got {mass}"),
            ));
        }
        chi_b.validate()?;
        let mut cells: Vec<(Vec<f64>, f64)> = match spec {
            GridSpec::Uniform { cutoff, points } => {
                if !(*cutoff > 0.0 && cutoff.is_finite()) || *points == 0 {
                    return Err(Error::config(
                        "grid",
                        "uniform grid needs cutoff > 0 and points >= 1",
                    ));
                }
                let step = 2.0 * cutoff / *points as f64;
                let axis: Vec<f64> = (0..*points)
                    .map(|i| -cutoff + step * (i as f64 + 0.5))
                    .collect();
                let weight = step.powi(dimension as i32);
                tensor_points(&axis, dimension)
                    .into_iter()
                    .map(|k| (k, weight))
                    .collect()
            }
            GridSpec::Explicit { modes, weights } => {
                if modes.len() != weights.len() {
                    return Err(Error::config(
                        "grid.weights",
                        format!("{} weights for {} modes", weights.len(), modes.len()),
                    ));
                }
                modes.iter().cloned().zip(weights.iter().copied()).collect()
            }
        };
        if cells.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (k, _) in &cells {
            if k.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: k.len(),
                });
            }
        }
        cells.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        for (index, pair) in cells.windows(2).enumerate() {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateMode { index: index + 1 });
            }
        }

        let mut grid = ModeGrid {
            dimension,
            mass,
            modes: Vec::with_capacity(cells.len()),
            weights: Vec::with_capacity(cells.len()),
            omega: Vec::with_capacity(cells.len()),
            chi_b: Vec::with_capacity(cells.len()),
            rho: Vec::with_capacity(cells.len()),
        };
        for (index, (k, w)) in cells.into_iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonpositiveWeight { index, weight: w });
            }
            let k2: f64 = k.iter().map(|c| c * c).sum();
            let omega = (k2 + mass * mass).sqrt();
            if omega <= 0.0 {
                return Err(Error::ZeroFrequencyMode { index });
            }
            let chi = chi_b.eval(&k);
            grid.rho.push(chi / omega.sqrt());
            grid.chi_b.push(chi);
            grid.omega.push(omega);
            grid.weights.push(w);
            grid.modes.push(k);
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momentum(&self, i: usize) -> &[f64] {
        &self.modes[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn chi_b(&self) -> &[f64] {
        &self.chi_b
    }

    /// `rho_b(k_i) = chi_b(k_i) / sqrt(omega(k_i))`.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn min_omega(&self) -> f64 {
        self.omega.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Discrete `|| chi_b / omega^p ||`.
    pub fn cutoff_norm(&self, exponent: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.chi_b)
            .zip(&self.omega)
            .map(|((w, c), o)| w * c * c / o.powf(2.0 * exponent))
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete L2 inner product `(f, g) = sum_i w_i conj(f_i) g_i`.
    pub fn inner(&self, f: &[crate::C64], g: &[crate::C64]) -> crate::C64 {
        self.weights
            .iter()
            .zip(f)
            .zip(g)
            .map(|((w, a), b)| a.conj() * b * *w)
            .sum()
    }

    /// Discrete `||f||^2`.
    pub fn norm_sq(&self, f: &[crate::C64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .map(|(w, a)| w * a.norm_sqr())
            .sum()
    }

    /// `rho_{b,x}(k_i) = rho_b(k_i) exp(-i k_i . x)`.
    pub fn field_smearing(&self, x: &[f64]) -> Vec<crate::C64> {
        self.modes
            .iter()
            .zip(&self.rho)
            .map(|(k, r)| {
                let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
                crate::C64::from_polar(*r, -phase)
            })
            .collect()
    }

    /// True when `k -> -k` maps the grid onto itself with equal weights and
    /// cutoff values. Fields at different points commute only then.
    pub fn is_reflection_symmetric(&self) -> bool {
        (0..self.len()).all(|i| {
            let neg: Vec<f64> = self.modes[i].iter().map(|c| -c).collect();
            match self.modes.binary_search_by(|m| lex_cmp(m, &neg)) {
                Ok(j) => self.weights[j] == self.weights[i] && self.chi_b[j] == self.chi_b[i],
                Err(_) => false,
            }
        })
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or_else(|| x.total_cmp(y)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Tensor product of `axis` with itself, first axis slowest (lexicographic).
fn tensor_points(axis: &[f64], dimension: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dimension {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase", deny_unknown_fields)]
pub enum QuadratureSpec {
    /// Composite trapezoid with `nodes` points per axis over the cutoff support.
    Trapezoid { nodes: usize },
    /// Composite Simpson; `nodes` must be odd.
    Simpson { nodes: usize },
    Explicit {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialQuadrature {
    dimension: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    chi_values: Vec<f64>,
    truncation_error: f64,
}

impl SpatialQuadrature {
    pub fn build(dimension: usize, chi_i: &CutoffSpec, spec: &QuadratureSpec) -> Result<Self> {
        chi_i.validate()?;
        let (nodes, weights) = match spec {
            QuadratureSpec::Trapezoid { nodes } | QuadratureSpec::Simpson { nodes } => {
                let simpson = matches!(spec, QuadratureSpec::Simpson { .. });
                if *nodes == 0 {
                    return Err(Error::config("quadrature.nodes", "must be at least 1"));
                }
                if simpson && nodes % 2 == 0 {
                    return Err(Error::config(
                        "quadrature.nodes",
                        "simpson needs an odd node count",
                    ));
                }
                let (lo, hi) = chi_i.support(dimension);
                let (axis, axis_w) = rule_1d(lo, hi, *nodes, simpson);
                let pts = tensor_points(&axis, dimension);
                let ws = tensor_points(&axis_w, dimension)
                    .into_iter()
                    .map(|w| w.iter().product())
                    .collect();
                (pts, ws)
            }
            QuadratureSpec::Explicit { points, weights } => {
                if points.len() != weights.len() || points.is_empty() {
                    return Err(Error::config(
                        "quadrature",
                        format!("{} points with {} weights", points.len(), weights.len()),
                    ));
                }
                for p in points {
                    if p.len() != dimension {
                        return Err(Error::DimensionMismatch {
                            expected: dimension,
                            found: p.len(),
                        });
                    }
                }
                (points.clone(), weights.clone())
            }
        };
        let mut chi_values = Vec::with_capacity(nodes.len());
        for (index, (x, u)) in nodes.iter().zip(&weights).enumerate() {
            if !(*u > 0.0 && u.is_finite()) {
                return Err(Error::config(
                    "quadrature.weights",
                    format!("weight {index} is {u}, must be > 0"),
                ));
            }
            let value = chi_i.eval(x);
            if value < 0.0 {
                return Err(Error::NegativeSpatialCutoff { index, value });
            }
            chi_values.push(value);
        }
        Ok(SpatialQuadrature {
            dimension,
            nodes,
            weights,
            chi_values,
            truncation_error: chi_i.truncation_error(dimension),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.nodes[j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn chi_values(&self) -> &[f64] {
        &self.chi_values
    }

    /// `u_j chi_I(x_j)` for every node.
    pub fn node_coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.chi_values)
            .map(|(u, c)| u * c)
    }

    /// `sum_j u_j chi_I(x_j)`.
    pub fn total_mass(&self) -> f64 {
        self.node_coefficients().sum()
    }

    /// Discrete `||chi_I||_{L^1}`.
    pub fn chi_l1(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.chi_values)
            .map(|(u, c)| u * c.abs())
            .sum()
    }

    /// Integral mass dropped by truncating a gaussian cutoff (0 otherwise).
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }
}

fn rule_1d(lo: f64, hi: f64, n: usize, simpson: bool) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.5 * (lo + hi)], vec![hi - lo]);
    }
    let h = (hi - lo) / (n - 1) as f64;
    let nodes = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + h * i as f64 })
        .collect();
    let weights = (0..n)
        .map(|i| {
            let end = i == 0 || i == n - 1;
            if simpson {
                let c = if end {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            } else if end {
                0.5 * h
            } else {
                h
            }
        })
        .collect();
    (nodes, weights)
}
