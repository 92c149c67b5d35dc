//! A model instance: mode grid, spatial quadrature and Fock basis.

use crate::config::ModelParams;
use crate::error::Result;
use crate::fock::FockBasis;
use crate::grid::{CutoffSpec, GridSpec, ModeGrid, QuadratureSpec, SpatialQuadrature};
use crate::hamiltonian::HamiltonianSet;

#[derive(Debug, Clone)]
pub struct Model {
    pub grid: ModeGrid,
    pub quadrature: SpatialQuadrature,
    pub basis: FockBasis,
}

impl Model {
    pub fn new(
        grid: ModeGrid,
        quadrature: SpatialQuadrature,
        n_max: usize,
        max_dimension: usize,
    ) -> Result<Self> {
        let basis = FockBasis::enumerate_with_limit(grid.len(), n_max, max_dimension)?;
        Ok(Model {
            grid,
            quadrature,
            basis,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn build(
        dimension: usize,
        mass: f64,
        grid: &GridSpec,
        chi_b: &CutoffSpec,
        chi_i: &CutoffSpec,
        quadrature: &QuadratureSpec,
        n_max: usize,
        max_dimension: usize,
    ) -> Result<Self> {
        let grid = ModeGrid::build(dimension, mass, grid, chi_b)?;
        let quadrature = SpatialQuadrature::build(dimension, chi_i, quadrature)?;
        Self::new(grid, quadrature, n_max, max_dimension)
    }

    pub fn from_params(p: &ModelParams) -> Result<Self> {
        Self::build(
            p.model.dimension,
            p.model.mass,
            &p.grid,
            &p.chi_b,
            &p.chi_i,
            &p.quadrature,
            p.model.n_max,
            p.model.max_dimension,
        )
    }

    /// Same grid and quadrature with a different truncation.
    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.quadrature.clone(),
            n_max,
            usize::MAX,
        )
    }

    pub fn hamiltonians(&self) -> HamiltonianSet<'_> {
        HamiltonianSet::new(&self.basis, &self.grid, &self.quadrature)
    }
}
