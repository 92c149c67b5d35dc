//! Shared fixtures and an independent dense construction of every operator.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use nalgebra::DMatrix;
use phi4lab::config::ModelParams;
use phi4lab::fock::{FockBasis, FockVector};
use phi4lab::grid::{CutoffSpec, GridSpec, ModeGrid, QuadratureSpec, SpatialQuadrature};
use phi4lab::model::Model;
use phi4lab::operator::LinearOperator;
use phi4lab::C64;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

pub fn reference_params() -> ModelParams {
    ModelParams::load(&config_path("reference.toml")).expect("reference config loads")
}

pub fn reference_model(n_max: usize) -> Model {
    Model::from_params(&reference_params())
        .unwrap()
        .with_n_max(n_max)
        .unwrap()
}

/// Single mode at `k = 0` with the reference mass and cutoffs.
pub fn single_mode_model(n_max: usize) -> Model {
    Model::build(
        1,
        16.0,
        &GridSpec::Uniform {
            cutoff: 1.0,
            points: 1,
        },
        &CutoffSpec::indicator(0.0, 10.0),
        &CutoffSpec::indicator(0.0, 1.0),
        &QuadratureSpec::Trapezoid { nodes: 9 },
        n_max,
        usize::MAX,
    )
    .unwrap()
}

/// Two modes without reflection symmetry, so the field smearings are complex.
pub fn two_mode_model(n_max: usize) -> Model {
    Model::build(
        1,
        16.0,
        &GridSpec::Explicit {
            modes: vec![vec![-1.0], vec![2.0]],
            weights: vec![0.7, 1.3],
        },
        &CutoffSpec::gaussian(0.0, 2.0, 1.0),
        &CutoffSpec::indicator(0.0, 1.0),
        &QuadratureSpec::Trapezoid { nodes: 5 },
        n_max,
        usize::MAX,
    )
    .unwrap()
}

/// Every occupation tuple with total at most `n_max`, by direct recursion.
fn occupations(modes: usize, n_max: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, modes: usize, left: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == modes {
            out.push(prefix.clone());
            return;
        }
        for n in 0..=left {
            prefix.push(n as u8);
            rec(prefix, modes, left - n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), modes, n_max, &mut out);
    out
}

/// Dense matrices in the library's basis order, built from occupation
/// numbers alone.
pub struct DenseOracle {
    pub annihilation: Vec<DMatrix<C64>>,
    /// Occupation numbers in the library's basis order.
    pub occupations: Vec<Vec<u8>>,
    pub dim: usize,
}

impl DenseOracle {
    pub fn new(basis: &FockBasis) -> Self {
        let dim = basis.dim();
        let index: HashMap<Vec<u8>, usize> = (0..dim)
            .map(|s| (basis.occupation(s).to_vec(), s))
            .collect();
        let all = occupations(basis.modes(), basis.n_max());
        assert_eq!(
            all.len(),
            dim,
            "independent enumeration disagrees on the dimension"
        );
        let mut annihilation = vec![DMatrix::zeros(dim, dim); basis.modes()];
        for occ in &all {
            let s = index[occ];
            for (i, a) in annihilation.iter_mut().enumerate() {
                if occ[i] > 0 {
                    let mut lower = occ.clone();
                    lower[i] -= 1;
                    a[(index[&lower], s)] = C64::new((occ[i] as f64).sqrt(), 0.0);
                }
            }
        }
        let mut occupations = vec![Vec::new(); dim];
        for occ in all {
            let s = index[&occ];
            occupations[s] = occ;
        }
        DenseOracle {
            annihilation,
            occupations,
            dim,
        }
    }

    /// `sum_i omega_i n_i` on the diagonal.
    pub fn free(&self, grid: &ModeGrid) -> DMatrix<C64> {
        self.diagonal(grid.omega())
    }

    pub fn number(&self) -> DMatrix<C64> {
        self.diagonal(&vec![1.0; self.occupations[0].len()])
    }

    fn diagonal(&self, h: &[f64]) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (s, occ) in self.occupations.iter().enumerate() {
            m[(s, s)] = C64::new(occ.iter().zip(h).map(|(&n, e)| n as f64 * e).sum(), 0.0);
        }
        m
    }

    /// `phi(x) = sum_i sqrt(w_i) (conj(rho_i) a_i + rho_i a_i^dagger) / sqrt2`
    /// with `rho_i = chi_b(k_i) / sqrt(omega_i) exp(-i k_i x)`.
    pub fn field(&self, grid: &ModeGrid, x: &[f64]) -> DMatrix<C64> {
        let mut phi = DMatrix::zeros(self.dim, self.dim);
        for (i, a) in self.annihilation.iter().enumerate() {
            let k = grid.momentum(i);
            let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
            let rho = C64::from_polar(grid.chi_b()[i] / grid.omega()[i].sqrt(), -phase);
            let c = rho * (grid.weights()[i] / 2.0).sqrt();
            phi += a * c.conj() + a.adjoint() * c;
        }
        phi
    }

    pub fn interaction(&self, grid: &ModeGrid, quad: &SpatialQuadrature) -> DMatrix<C64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for j in 0..quad.len() {
            let c = quad.weights()[j] * quad.chi_values()[j];
            let phi = self.field(grid, quad.node(j));
            let phi2 = &phi * &phi;
            h += &phi2 * &phi2 * C64::new(c, 0.0);
        }
        h
    }
}

/// Matrix of a matrix-free operator, column by column.
pub fn assembled(op: &dyn LinearOperator) -> DMatrix<C64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = op.apply(&FockVector::unit(n, j));
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dense_ground_energy(h: &DMatrix<C64>) -> f64 {
    h.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
