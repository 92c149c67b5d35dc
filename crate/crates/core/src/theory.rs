//! Closed-form constants and bounds built from grid and quadrature data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockVector, VacuumProjection};
use crate::grid::{ModeGrid, SpatialQuadrature};
use crate::hamiltonian::HamiltonianSet;
use crate::operator::LinearOperator;
use crate::C64;

/// Smallest truncation for which `b` is computed without truncation error.
pub const LEMMA31_MIN_N_MAX: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffNorms {
    /// `||chi_b||`
    pub chi_b: f64,
    /// `||chi_b / omega^{1/2}|| = ||rho_b||`
    pub chi_b_omega_half: f64,
    /// `||chi_b / omega||`
    pub chi_b_omega: f64,
    /// `||chi_b / omega^{3/2}||`
    pub chi_b_omega_three_halves: f64,
    /// `||chi_I||_{L^1}`
    pub chi_i_l1: f64,
}

impl CutoffNorms {
    pub fn new(grid: &ModeGrid, quad: &SpatialQuadrature) -> Self {
        CutoffNorms {
            chi_b: grid.cutoff_norm(0.0),
            chi_b_omega_half: grid.cutoff_norm(0.5),
            chi_b_omega: grid.cutoff_norm(1.0),
            chi_b_omega_three_halves: grid.cutoff_norm(1.5),
            chi_i_l1: quad.chi_l1(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryConstants {
    /// `<Omega_0, H_I Omega_0>`
    pub c1: f64,
    pub nu0: f64,
    pub a: f64,
    pub b: f64,
    pub c_bos: f64,
    pub d_bos: f64,
    pub chi_i_l1: f64,
    pub norms: CutoffNorms,
}

impl TheoryConstants {
    pub fn compute(set: &HamiltonianSet<'_>) -> Result<Self> {
        let lemma = lemma31_constants(set)?;
        let (c_bos, d_bos) = hbound_constants(set.grid, set.quadrature);
        Ok(TheoryConstants {
            c1: first_order_coefficient(set.grid, set.quadrature),
            nu0: lemma.nu0,
            a: lemma.a,
            b: lemma.b,
            c_bos,
            d_bos,
            chi_i_l1: set.quadrature.chi_l1(),
            norms: CutoffNorms::new(set.grid, set.quadrature),
        })
    }
}

/// Wick pairing: `<Omega_0, H_I Omega_0> = (sum_j u_j chi_I(x_j)) 3/4 ||rho_b||^4`.
pub fn first_order_coefficient(grid: &ModeGrid, quad: &SpatialQuadrature) -> f64 {
    let rho_sq = grid.cutoff_norm(0.5).powi(2);
    quad.total_mass() * 0.75 * rho_sq * rho_sq
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31 {
    pub nu0: f64,
    pub a: f64,
    pub b: f64,
    /// `r = (H_0^perp)^{-1} P_0^perp H_I Omega_0`.
    pub r: FockVector,
}

impl Lemma31 {
    /// `Omega_0 - kappa r`, the trial vector behind [`rayleigh_upper_bound`].
    pub fn trial_vector(&self, kappa: f64) -> FockVector {
        let mut t = FockVector::vacuum(self.r.len());
        t.axpy(C64::new(-kappa, 0.0), &self.r);
        t
    }
}

pub fn lemma31_constants(set: &HamiltonianSet<'_>) -> Result<Lemma31> {
    let basis = set.basis;
    if basis.n_max() < LEMMA31_MIN_N_MAX {
        return Err(Error::TruncationTooSmall {
            n_max: basis.n_max(),
            required: LEMMA31_MIN_N_MAX,
        });
    }
    let w = set.apply_hi(&FockVector::vacuum(basis.dim()));
    let w_perp = basis.project_vacuum(&w, VacuumProjection::Complement);
    let r = basis.apply_h0perp_inverse(set.grid, &w_perp);
    let b = r.dot(&set.interaction.apply(&r)).re;
    Ok(Lemma31 {
        nu0: r.norm_sqr(),
        a: w_perp.dot(&r).re,
        b,
        r,
    })
}

/// `(c1 kappa - a kappa^2 + b kappa^3) / (1 + nu0)`, as displayed in the
/// source lemma. Not asserted as an inequality.
pub fn paper_upper_bound(kappa: f64, c: &TheoryConstants) -> f64 {
    cubic(kappa, c) / (1.0 + c.nu0)
}

/// Rayleigh quotient of `Omega_0 - kappa r`:
/// `(c1 kappa - a kappa^2 + b kappa^3) / (1 + kappa^2 nu0)`.
pub fn rayleigh_upper_bound(kappa: f64, c: &TheoryConstants) -> f64 {
    cubic(kappa, c) / (1.0 + kappa * kappa * c.nu0)
}

fn cubic(kappa: f64, c: &TheoryConstants) -> f64 {
    kappa * (c.c1 + kappa * (-c.a + kappa * c.b))
}

/// `(c_bos, d_bos) = (16 ||chi_I||_1 ||chi_b||^2 ||chi_b/omega||^2,
/// ||chi_I||_1 ||chi_b||^2 ||chi_b/sqrt(omega)||^2)`.
pub fn hbound_constants(grid: &ModeGrid, quad: &SpatialQuadrature) -> (f64, f64) {
    let n = CutoffNorms::new(grid, quad);
    let base = n.chi_i_l1 * n.chi_b * n.chi_b;
    (
        16.0 * base * n.chi_b_omega * n.chi_b_omega,
        base * n.chi_b_omega_half * n.chi_b_omega_half,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonFamily {
    pub epsilon: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Boson number bound `c_{eps,kappa}`.
    pub c_number: f64,
}

/// `lambda = 1/(1 - c_bos eps kappa)`, `mu = kappa (4 d_bos + c_bos/(4 eps)) lambda`,
/// `c = 8 ||chi_b/omega^{3/2}||^2 (lambda E0^2 + mu + kappa^2 ||chi_I||_1^2 / 2)`.
pub fn epsilon_family(
    epsilon: f64,
    kappa: f64,
    e0: f64,
    grid: &ModeGrid,
    quad: &SpatialQuadrature,
) -> Result<EpsilonFamily> {
    let (c_bos, d_bos) = hbound_constants(grid, quad);
    let upper = admissible_upper(c_bos, kappa);
    if !(epsilon > 0.0 && epsilon < upper) || kappa < 0.0 {
        return Err(Error::EpsilonOutOfRange { epsilon, upper });
    }
    let lambda = 1.0 / (1.0 - c_bos * epsilon * kappa);
    let mu = kappa * (4.0 * d_bos + c_bos / (4.0 * epsilon)) * lambda;
    let n32 = grid.cutoff_norm(1.5);
    let l1 = quad.chi_l1();
    let c_number = 8.0 * n32 * n32 * (lambda * e0 * e0 + mu + 0.5 * kappa * kappa * l1 * l1);
    Ok(EpsilonFamily {
        epsilon,
        kappa,
        lambda,
        mu,
        c_number,
    })
}

/// Supremum of the admissible `epsilon` interval, `1/(c_bos kappa)`.
pub fn admissible_upper(c_bos: f64, kappa: f64) -> f64 {
    let p = c_bos * kappa;
    if p > 0.0 {
        1.0 / p
    } else {
        f64::INFINITY
    }
}

/// How `epsilon` is chosen for the boson number bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase", deny_unknown_fields)]
pub enum EpsilonPolicy {
    /// Minimize `c_{eps,kappa}` (see [`optimize_epsilon`]).
    #[default]
    Optimized,
    Fixed {
        value: f64,
    },
}

impl EpsilonPolicy {
    pub fn family(
        &self,
        kappa: f64,
        e0: f64,
        grid: &ModeGrid,
        quad: &SpatialQuadrature,
    ) -> Result<EpsilonFamily> {
        match *self {
            EpsilonPolicy::Optimized => Ok(optimize_epsilon(kappa, e0, grid, quad)?.family),
            EpsilonPolicy::Fixed { value } => epsilon_family(value, kappa, e0, grid, quad),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonOptimum {
    pub family: EpsilonFamily,
    /// Set when `c_bos kappa = 0`, where `c_{eps,kappa}` does not depend on
    /// `eps` and `eps = 1` is returned.
    pub degenerate: bool,
}

/// Minimizes `c_{eps,kappa}` over `eps in (0, 1/(c_bos kappa))` by golden
/// section search on the logit of `t = c_bos eps kappa`.
pub fn optimize_epsilon(
    kappa: f64,
    e0: f64,
    grid: &ModeGrid,
    quad: &SpatialQuadrature,
) -> Result<EpsilonOptimum> {
    let (c_bos, _) = hbound_constants(grid, quad);
    let scale = c_bos * kappa;
    if scale.is_nan() || scale <= 0.0 {
        return Ok(EpsilonOptimum {
            family: epsilon_family(1.0, kappa, e0, grid, quad)?,
            degenerate: true,
        });
    }
    let eps_of = |s: f64| 1.0 / (1.0 + (-s).exp()) / scale;
    let cost = |s: f64| {
        epsilon_family(eps_of(s), kappa, e0, grid, quad).map_or(f64::INFINITY, |f| f.c_number)
    };
    let s = golden_section(cost, -60.0, 40.0, 1e-9);
    Ok(EpsilonOptimum {
        family: epsilon_family(eps_of(s), kappa, e0, grid, quad)?,
        degenerate: false,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}
