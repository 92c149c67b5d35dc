//! Field operators, the quartic interaction and `H(kappa) = H_0 + kappa H_I`.
//!
//! `H_I` is applied as four successive truncated field applications per
//! quadrature node, `H_I v = sum_j u_j chi_I(x_j) phi(x_j)^4 v`. Each truncated
//! field is Hermitian on the truncated space, so `H_I` is too.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockVector, Ladder};
use crate::grid::{ModeGrid, SpatialQuadrature};
use crate::operator::LinearOperator;
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct FreeHamiltonian<'a> {
    basis: &'a FockBasis,
    grid: &'a ModeGrid,
}

impl<'a> FreeHamiltonian<'a> {
    pub fn new(basis: &'a FockBasis, grid: &'a ModeGrid) -> Self {
        FreeHamiltonian { basis, grid }
    }
}

impl LinearOperator for FreeHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        self.basis.apply_free(self.grid, v)
    }

    fn describe(&self) -> String {
        "H0 = dGamma(omega)".into()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NumberOperator<'a> {
    basis: &'a FockBasis,
}

impl<'a> NumberOperator<'a> {
    pub fn new(basis: &'a FockBasis) -> Self {
        NumberOperator { basis }
    }
}

impl LinearOperator for NumberOperator<'_> {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        self.basis.apply_number(v)
    }

    fn describe(&self) -> String {
        "N_b = dGamma(1)".into()
    }
}

/// `phi(x) = phi_S(rho_{b,x})` with `rho_{b,x}(k) = rho_b(k) exp(-i k.x)`.
#[derive(Debug, Clone)]
pub struct FieldOperator<'a> {
    basis: &'a FockBasis,
    grid: &'a ModeGrid,
    x: Vec<f64>,
    smearing: Vec<C64>,
}

impl<'a> FieldOperator<'a> {
    pub fn new(basis: &'a FockBasis, grid: &'a ModeGrid, x: &[f64]) -> Self {
        FieldOperator {
            basis,
            grid,
            x: x.to_vec(),
            smearing: grid.field_smearing(x),
        }
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn smearing(&self) -> &[C64] {
        &self.smearing
    }

    /// `phi(x)^n v`.
    pub fn power(&self, v: &FockVector, n: usize) -> FockVector {
        let mut out = v.clone();
        for _ in 0..n {
            out = self.apply(&out);
        }
        out
    }
}

impl LinearOperator for FieldOperator<'_> {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        self.basis
            .apply_smeared(self.grid, &self.smearing, v, Ladder::Segal)
    }

    fn describe(&self) -> String {
        format!("phi(x = {:?})", self.x)
    }
}

pub fn build_field<'a>(basis: &'a FockBasis, grid: &'a ModeGrid, x: &[f64]) -> FieldOperator<'a> {
    FieldOperator::new(basis, grid, x)
}

/// `H_I = sum_j u_j chi_I(x_j) phi(x_j)^4`.
#[derive(Debug, Clone)]
pub struct Interaction<'a> {
    basis: &'a FockBasis,
    terms: Vec<(f64, FieldOperator<'a>)>,
}

impl<'a> Interaction<'a> {
    pub fn new(basis: &'a FockBasis, grid: &'a ModeGrid, quad: &SpatialQuadrature) -> Self {
        let terms = quad
            .node_coefficients()
            .enumerate()
            .map(|(j, c)| (c, FieldOperator::new(basis, grid, quad.node(j))))
            .collect();
        Interaction { basis, terms }
    }

    /// `(u_j chi_I(x_j), phi(x_j))` for every quadrature node.
    pub fn terms(&self) -> &[(f64, FieldOperator<'a>)] {
        &self.terms
    }
}

impl LinearOperator for Interaction<'_> {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::zeros(self.basis.dim());
        for (c, field) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            out.axpy(C64::new(*c, 0.0), &field.power(v, 4));
        }
        out
    }

    fn describe(&self) -> String {
        format!("H_I ({} quadrature nodes)", self.terms.len())
    }
}

/// `H(kappa) = H_0 + kappa H_I`.
#[derive(Debug, Clone, Copy)]
pub struct Hamiltonian<'s> {
    free: &'s FreeHamiltonian<'s>,
    interaction: &'s Interaction<'s>,
    kappa: f64,
}

impl Hamiltonian<'_> {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl LinearOperator for Hamiltonian<'_> {
    fn dim(&self) -> usize {
        self.free.dim()
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = self.free.apply(v);
        if self.kappa != 0.0 {
            out.axpy(C64::new(self.kappa, 0.0), &self.interaction.apply(v));
        }
        out
    }

    fn describe(&self) -> String {
        format!("H(kappa = {}) = H0 + kappa H_I", self.kappa)
    }
}

/// The operators of one model instance, sharing basis, grid and quadrature.
#[derive(Debug, Clone)]
pub struct HamiltonianSet<'a> {
    pub basis: &'a FockBasis,
    pub grid: &'a ModeGrid,
    pub quadrature: &'a SpatialQuadrature,
    pub free: FreeHamiltonian<'a>,
    pub interaction: Interaction<'a>,
}

impl<'a> HamiltonianSet<'a> {
    pub fn new(
        basis: &'a FockBasis,
        grid: &'a ModeGrid,
        quadrature: &'a SpatialQuadrature,
    ) -> Self {
        assert_eq!(
            basis.modes(),
            grid.len(),
            "basis and grid disagree on the number of modes"
        );
        HamiltonianSet {
            basis,
            grid,
            quadrature,
            free: FreeHamiltonian::new(basis, grid),
            interaction: Interaction::new(basis, grid, quadrature),
        }
    }

    pub fn h_kappa(&self, kappa: f64) -> Result<Hamiltonian<'_>> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::NegativeCoupling(kappa));
        }
        Ok(Hamiltonian {
            free: &self.free,
            interaction: &self.interaction,
            kappa,
        })
    }

    pub fn number(&self) -> NumberOperator<'a> {
        NumberOperator::new(self.basis)
    }

    pub fn field(&self, x: &[f64]) -> FieldOperator<'a> {
        FieldOperator::new(self.basis, self.grid, x)
    }

    pub fn apply_hi(&self, v: &FockVector) -> FockVector {
        self.interaction.apply(v)
    }

    pub fn apply_hkappa(&self, kappa: f64, v: &FockVector) -> Result<FockVector> {
        Ok(self.h_kappa(kappa)?.apply(v))
    }
}

/// Compressed-row sparse matrix assembled from a matrix-free operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    hermitian: bool,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

/// Columns are `A e_j`; entries that are exactly zero are not stored.
pub fn assemble_sparse(op: &dyn LinearOperator, limit: usize) -> Result<SparseMatrix> {
    let dim = op.dim();
    if dim > limit {
        return Err(Error::BasisTooLarge {
            dimension: dim as u128,
            limit,
        });
    }
    let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
    for j in 0..dim {
        let col = op.apply(&FockVector::unit(dim, j));
        for (i, c) in col.iter().enumerate() {
            if *c != C64::new(0.0, 0.0) {
                triplets.push((i, j, *c));
            }
        }
    }
    triplets.sort_by_key(|&(i, j, _)| (i, j));
    let mut row_ptr = vec![0usize; dim + 1];
    for &(i, _, _) in &triplets {
        row_ptr[i + 1] += 1;
    }
    for i in 0..dim {
        row_ptr[i + 1] += row_ptr[i];
    }
    Ok(SparseMatrix {
        dim,
        hermitian: op.is_hermitian(),
        row_ptr,
        cols: triplets.iter().map(|t| t.1).collect(),
        values: triplets.iter().map(|t| t.2).collect(),
    })
}

impl SparseMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.values[k];
            }
        }
        m
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                worst = worst.max((self.values[k] - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * v[self.cols[k]];
            }
            out[i] = acc;
        }
        out
    }

    fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    fn describe(&self) -> String {
        format!("sparse {}x{} ({} nonzeros)", self.dim, self.dim, self.nnz())
    }
}
