//! Ground states by Lanczos iteration and shifted Hermitian solves by CG.
//!
//! Lanczos keeps every Krylov vector and reorthogonalizes each new one twice
//! against all of them (classical Gram-Schmidt, applied twice). When the
//! Krylov space reaches `krylov_dim` without convergence, the process restarts
//! from the current lowest Ritz vector. Ritz values are recomputed at every
//! step for the first 40 steps of a cycle and every 8 steps after that.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{random_complex, FockBasis, FockVector};
use crate::operator::LinearOperator;
use crate::C64;

pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Absolute tolerance on `||H v - E v||`.
    pub tol: f64,
    /// Budget of operator applications.
    pub max_iter: usize,
    /// Krylov space size before a restart.
    pub krylov_dim: usize,
    pub seed: u64,
    /// Relative degeneracy threshold, scaled by `max(1, |E|)`.
    pub degeneracy: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-10,
            max_iter: 20_000,
            krylov_dim: 200,
            seed: 0,
            degeneracy: DEFAULT_DEGENERACY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralWarning {
    /// The two lowest Ritz values are closer than the degeneracy threshold.
    NearDegenerate { gap: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub energy: f64,
    /// Unit norm; the vacuum coefficient is real and nonnegative.
    pub ground_vector: FockVector,
    pub residual: f64,
    pub iterations: usize,
    /// Distance to the lowest eigenvalue on the orthogonal complement of the
    /// ground vector, computed to a loose tolerance (`+inf` in one dimension).
    pub gap_estimate: f64,
    /// Weight in grades above `N_max - 4`.
    pub top_grade_weight: f64,
    pub warnings: Vec<SpectralWarning>,
}

fn ritz_check_due(step: usize) -> bool {
    step < 40 || step % 8 == 7
}

/// Lowest eigenpair of a Hermitian operator.
pub fn ground_state(
    op: &dyn LinearOperator,
    basis: &FockBasis,
    opts: &EigenOptions,
) -> Result<SpectralResult> {
    let dim = op.dim();
    if dim != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = FockVector::from_coeffs((0..dim).map(|_| random_complex(&mut rng)).collect());
    start.normalize();

    let krylov_dim = opts.krylov_dim.clamp(2, dim.max(2)).min(dim);
    let mut matvecs = 0usize;
    let mut last_residual = f64::INFINITY;
    loop {
        let mut x = lanczos_cycle(
            op,
            &start,
            &[],
            krylov_dim,
            opts.tol,
            opts.max_iter,
            &mut matvecs,
        )
        .ritz_vector;
        x.normalize();
        let hx = op.apply(&x);
        matvecs += 1;
        let energy = x.dot(&hx).re;
        let mut r = hx;
        r.axpy(C64::new(-energy, 0.0), &x);
        let residual = r.norm();
        last_residual = last_residual.min(residual);
        if residual <= opts.tol {
            fix_phase(&mut x);
            let second = second_eigenvalue(op, &x, krylov_dim, opts, &mut rng, &mut matvecs);
            let gap = second - energy;
            let threshold = opts.degeneracy * energy.abs().max(1.0);
            let warnings = if gap < threshold {
                vec![SpectralWarning::NearDegenerate { gap, threshold }]
            } else {
                Vec::new()
            };
            let top_grade_weight = if basis.n_max() >= 4 {
                basis.weight_above_grade(&x, basis.n_max() - 4)
            } else {
                x.norm_sqr()
            };
            return Ok(SpectralResult {
                energy,
                ground_vector: x,
                residual,
                iterations: matvecs,
                gap_estimate: gap,
                top_grade_weight,
                warnings,
            });
        }
        if matvecs >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: last_residual,
            });
        }
        start = x;
    }
}

/// Lowest eigenvalue of `H` restricted to the orthogonal complement of the
/// unit vector `ground`, to a loose tolerance. Exact degeneracies are
/// invisible to a single Krylov sequence, so the gap is measured this way.
/// Returns `+inf` on a one-dimensional space.
fn second_eigenvalue(
    op: &dyn LinearOperator,
    ground: &FockVector,
    krylov_dim: usize,
    opts: &EigenOptions,
    rng: &mut ChaCha8Rng,
    matvecs: &mut usize,
) -> f64 {
    let dim = op.dim();
    if dim < 2 {
        return f64::INFINITY;
    }
    let locked = std::slice::from_ref(ground);
    let mut start = FockVector::from_coeffs((0..dim).map(|_| random_complex(rng)).collect());
    orthogonalize(&mut start, locked);
    start.normalize();
    let tol = opts.tol.max(1e-8);
    let budget = *matvecs + opts.max_iter;
    loop {
        let cycle = lanczos_cycle(
            op,
            &start,
            locked,
            krylov_dim.min(dim - 1),
            tol,
            budget,
            matvecs,
        );
        if cycle.converged || *matvecs >= budget {
            return cycle.theta;
        }
        start = cycle.ritz_vector;
        orthogonalize(&mut start, locked);
        start.normalize();
    }
}

fn orthogonalize(w: &mut FockVector, against: &[FockVector]) {
    for _ in 0..2 {
        for q in against {
            let c = q.dot(w);
            w.axpy(-c, q);
        }
    }
}

struct Cycle {
    ritz_vector: FockVector,
    theta: f64,
    converged: bool,
}

/// One Lanczos cycle from the unit vector `start`, kept orthogonal to
/// `locked`. Stops on convergence of the lowest Ritz pair (residual
/// estimate below `tol / 2`), an invariant subspace, a full Krylov space or
/// the matvec budget.
fn lanczos_cycle(
    op: &dyn LinearOperator,
    start: &FockVector,
    locked: &[FockVector],
    krylov_dim: usize,
    tol: f64,
    budget: usize,
    matvecs: &mut usize,
) -> Cycle {
    let mut basis_vectors: Vec<FockVector> = vec![start.clone()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let (y, theta, converged) = loop {
        let j = alpha.len();
        let mut w = op.apply(&basis_vectors[j]);
        *matvecs += 1;
        let a = basis_vectors[j].dot(&w).re;
        alpha.push(a);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis_vectors);
        let b = w.norm();
        let invariant = b <= f64::EPSILON * a.abs().max(1.0);
        let stop = invariant || j + 1 >= krylov_dim || *matvecs >= budget;
        if stop || ritz_check_due(j) {
            let (y, theta) = lowest_ritz(&alpha, &beta);
            let converged = invariant || b * y[j].abs() <= 0.5 * tol;
            if stop || converged {
                break (y, theta, converged);
            }
        }
        beta.push(b);
        w.scale(C64::new(1.0 / b, 0.0));
        basis_vectors.push(w);
    };
    let mut x = FockVector::zeros(start.len());
    for (q, c) in basis_vectors.iter().zip(&y) {
        x.axpy(C64::new(*c, 0.0), q);
    }
    Cycle {
        ritz_vector: x,
        theta,
        converged,
    }
}

/// Lowest eigenpair of the real symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`.
fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, f64) {
    let n = alpha.len();
    let t = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let lowest = (0..n)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .unwrap_or(0);
    (
        eig.eigenvectors.column(lowest).iter().copied().collect(),
        eig.eigenvalues[lowest],
    )
}

/// Rotates `v` so that its vacuum coefficient is real and nonnegative. If
/// that coefficient vanishes, the largest-magnitude coefficient is made real
/// and positive instead.
fn fix_phase(v: &mut FockVector) {
    let anchor = if v[0].norm() > 0.0 {
        v[0]
    } else {
        v.iter().copied().fold(
            C64::new(0.0, 0.0),
            |m, c| if c.norm() > m.norm() { c } else { m },
        )
    };
    if anchor.norm() > 0.0 {
        v.scale(anchor.conj() / anchor.norm());
        v[0].im = 0.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative tolerance: `||(H + sigma) x - b|| <= tol ||b||`.
    pub tol: f64,
    pub max_iter: usize,
    /// Known lower bound of the spectrum of `H`. When absent it is estimated
    /// by a ground-state computation.
    pub floor: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 10_000,
            floor: None,
        }
    }
}

/// Solves `(H + shift) x = rhs` by conjugate gradients.
pub fn solve_shifted(
    op: &dyn LinearOperator,
    shift: f64,
    rhs: &FockVector,
    opts: &SolveOptions,
) -> Result<FockVector> {
    let dim = op.dim();
    if rhs.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rhs.len(),
        });
    }
    let floor = match opts.floor {
        Some(f) => f,
        None => lowest_eigenvalue(op)?,
    };
    if (floor + shift).is_nan() || floor + shift <= 0.0 {
        return Err(Error::IndefiniteShift { shift, floor });
    }
    let target = opts.tol * rhs.norm();
    let mut x = FockVector::zeros(dim);
    if target == 0.0 {
        return Ok(x);
    }
    let shifted = |v: &FockVector| {
        let mut out = op.apply(v);
        out.axpy(C64::new(shift, 0.0), v);
        out
    };
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs = r.norm_sqr();
    for k in 0..opts.max_iter {
        let ap = shifted(&p);
        let pap = p.dot(&ap).re;
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::IndefiniteShift { shift, floor });
        }
        let step = rs / pap;
        x.axpy(C64::new(step, 0.0), &p);
        r.axpy(C64::new(-step, 0.0), &ap);
        let rs_new = r.norm_sqr();
        if rs_new.sqrt() <= target || k % 50 == 49 {
            r = rhs - &shifted(&x);
            let true_rs = r.norm_sqr();
            if true_rs.sqrt() <= target {
                return Ok(x);
            }
            rs = true_rs;
            p = r.clone();
            continue;
        }
        p.scale(C64::new(rs_new / rs, 0.0));
        p += &r;
        rs = rs_new;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: (rhs - &shifted(&x)).norm() / rhs.norm(),
    })
}

fn lowest_eigenvalue(op: &dyn LinearOperator) -> Result<f64> {
    let dim = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut start = FockVector::from_coeffs((0..dim).map(|_| random_complex(&mut rng)).collect());
    start.normalize();
    let opts = EigenOptions::default();
    let mut matvecs = 0;
    let cycle = lanczos_cycle(
        op,
        &start,
        &[],
        opts.krylov_dim.min(dim).max(1),
        1e-8,
        opts.max_iter,
        &mut matvecs,
    );
    // The lowest Ritz value approaches the minimum from above; subtract the
    // residual bound so the estimate stays a lower bound up to rounding.
    let mut x = cycle.ritz_vector;
    x.normalize();
    let hx = op.apply(&x);
    let theta = x.dot(&hx).re;
    let mut r = hx;
    r.axpy(C64::new(-theta, 0.0), &x);
    Ok(theta - r.norm())
}

/// `<v, H v> / <v, v>`.
pub fn rayleigh_quotient(op: &dyn LinearOperator, v: &FockVector) -> Result<f64> {
    let n = v.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.dot(&op.apply(v)).re / n)
}
