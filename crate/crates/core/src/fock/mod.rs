//! Truncated bosonic Fock space over a finite set of modes.
//!
//! States are occupation vectors `n = (n_1, .., n_M)` with `sum n_i <= N_max`,
//! ordered by total number first and lexicographically (ascending) inside a
//! grade. The vacuum is always index 0.
//!
//! Creation is the truncated `P_N a_i^dagger`: amplitude that would leave the
//! truncated space is dropped. Every operator here therefore maps the space
//! into itself; identities that need the untruncated algebra only hold on
//! vectors supported far enough below the top grade.

mod io;
mod vector;

use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::ModeGrid;
use crate::C64;

pub use io::{read_binary, read_text, write_binary, write_text, ORDER_TAG_GRADED_LEX};
pub use vector::FockVector;

/// Default cap on the basis dimension.
pub const DEFAULT_MAX_DIMENSION: usize = 4_000_000;

const NONE: u32 = u32::MAX;

/// Which smeared ladder operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// `a(f) = sum_i sqrt(w_i) conj(f_i) a_i`
    Annihilate,
    /// `a^dagger(f) = sum_i sqrt(w_i) f_i a_i^dagger`
    Create,
    /// `phi_S(f) = (a(f) + a^dagger(f)) / sqrt(2)`
    Segal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VacuumProjection {
    /// `P_0`, onto the vacuum line.
    Vacuum,
    /// `1 - P_0`.
    Complement,
}

/// Number of occupation vectors over `modes` modes with total at most `n_max`,
/// i.e. `binomial(modes + n_max, modes)`.
pub fn basis_dimension(modes: usize, n_max: usize) -> u128 {
    let k = modes.min(n_max) as u128;
    let n = (modes + n_max) as u128;
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.saturating_mul(n - j) / (j + 1);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    n_max: usize,
    dim: usize,
    occ: Vec<u8>,
    grade: Vec<u8>,
    grade_start: Vec<usize>,
    raise: Vec<u32>,
    lower: Vec<u32>,
    sqrt: Vec<f64>,
    binom: Vec<Vec<u64>>,
}

impl FockBasis {
    pub fn enumerate(modes: usize, n_max: usize) -> Result<Self> {
        Self::enumerate_with_limit(modes, n_max, DEFAULT_MAX_DIMENSION)
    }

    pub fn enumerate_with_limit(modes: usize, n_max: usize, limit: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::EmptyGrid);
        }
        if n_max > u8::MAX as usize {
            return Err(Error::config("model.n_max", "must be at most 255"));
        }
        let dimension = basis_dimension(modes, n_max);
        if dimension > limit as u128 || dimension >= NONE as u128 {
            return Err(Error::BasisTooLarge { dimension, limit });
        }
        let dim = dimension as usize;

        let top = modes + n_max;
        let mut binom = vec![vec![0u64; top + 1]; top + 1];
        for n in 0..=top {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1].saturating_add(binom[n - 1][k]);
            }
        }

        let mut occ = Vec::with_capacity(dim * modes);
        let mut grade = Vec::with_capacity(dim);
        let mut grade_start = Vec::with_capacity(n_max + 2);
        let mut current = vec![0u8; modes];
        for g in 0..=n_max {
            grade_start.push(grade.len());
            push_compositions(&mut current, 0, g, &mut occ);
            grade.resize(occ.len() / modes, g as u8);
        }
        grade_start.push(grade.len());
        debug_assert_eq!(grade.len(), dim);

        let mut basis = FockBasis {
            modes,
            n_max,
            dim,
            occ,
            grade,
            grade_start,
            raise: vec![NONE; modes * dim],
            lower: vec![NONE; modes * dim],
            sqrt: (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect(),
            binom,
        };
        let mut scratch = vec![0u8; modes];
        for s in 0..dim {
            if basis.grade[s] as usize == n_max {
                continue;
            }
            for i in 0..modes {
                scratch.copy_from_slice(basis.occupation(s));
                scratch[i] += 1;
                let t = basis
                    .rank(&scratch)
                    .expect("raised state lies inside the truncation");
                basis.raise[i * dim + s] = t as u32;
                basis.lower[i * dim + t] = s as u32;
            }
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn occupation(&self, s: usize) -> &[u8] {
        &self.occ[s * self.modes..(s + 1) * self.modes]
    }

    pub fn grade(&self, s: usize) -> usize {
        self.grade[s] as usize
    }

    /// Index range of all states with total number `g`.
    pub fn grade_range(&self, g: usize) -> Range<usize> {
        if g > self.n_max {
            return self.dim..self.dim;
        }
        self.grade_start[g]..self.grade_start[g + 1]
    }

    /// Position of an occupation vector, computed combinatorially.
    pub fn rank(&self, occupation: &[u8]) -> Option<usize> {
        if occupation.len() != self.modes {
            return None;
        }
        let g: usize = occupation.iter().map(|&n| n as usize).sum();
        if g > self.n_max {
            return None;
        }
        let mut remaining = g;
        let mut offset = 0u64;
        for (p, &n) in occupation.iter().enumerate().take(self.modes - 1) {
            let parts_after = self.modes - p - 1;
            for v in 0..n as usize {
                offset += self.compositions(remaining - v, parts_after);
            }
            remaining -= n as usize;
        }
        Some(self.grade_start[g] + offset as usize)
    }

    /// Number of ways to write `total` as an ordered sum of `parts` naturals.
    fn compositions(&self, total: usize, parts: usize) -> u64 {
        if parts == 0 {
            return u64::from(total == 0);
        }
        self.binom[total + parts - 1][parts - 1]
    }

    /// Index of `n + e_i`, if it is inside the truncation.
    pub fn raised(&self, i: usize, s: usize) -> Option<usize> {
        let t = self.raise[i * self.dim + s];
        (t != NONE).then_some(t as usize)
    }

    /// Index of `n - e_i`, if `n_i > 0`.
    pub fn lowered(&self, i: usize, s: usize) -> Option<usize> {
        let t = self.lower[i * self.dim + s];
        (t != NONE).then_some(t as usize)
    }

    fn check_len(&self, v: &FockVector) {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length does not match basis dimension"
        );
    }

    /// `P_N a_i^dagger v`.
    pub fn apply_creation(&self, i: usize, v: &FockVector) -> FockVector {
        self.apply_creation_tracked(i, v).0
    }

    /// Like [`Self::apply_creation`], also returning the squared norm that
    /// was dropped at the truncation boundary.
    pub fn apply_creation_tracked(&self, i: usize, v: &FockVector) -> (FockVector, f64) {
        self.check_len(v);
        let mut out = FockVector::zeros(self.dim);
        let mut dropped = 0.0;
        for (s, c) in v.iter().enumerate() {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            let n = self.occupation(s)[i] as usize;
            match self.raised(i, s) {
                Some(t) => out[t] += c * self.sqrt[n + 1],
                None => dropped += (n + 1) as f64 * c.norm_sqr(),
            }
        }
        (out, dropped)
    }

    /// `a_i v`.
    pub fn apply_annihilation(&self, i: usize, v: &FockVector) -> FockVector {
        self.check_len(v);
        let mut out = FockVector::zeros(self.dim);
        for (s, c) in v.iter().enumerate() {
            if let Some(t) = self.lowered(i, s) {
                out[t] += c * self.sqrt[self.occupation(s)[i] as usize];
            }
        }
        out
    }

    /// Smeared ladder operator with test function `f` sampled on the grid.
    pub fn apply_smeared(
        &self,
        grid: &ModeGrid,
        f: &[C64],
        v: &FockVector,
        which: Ladder,
    ) -> FockVector {
        self.check_len(v);
        assert_eq!(
            f.len(),
            self.modes,
            "test function must have one value per mode"
        );
        let scale = match which {
            Ladder::Segal => std::f64::consts::FRAC_1_SQRT_2,
            _ => 1.0,
        };
        let create = matches!(which, Ladder::Create | Ladder::Segal);
        let annihilate = matches!(which, Ladder::Annihilate | Ladder::Segal);
        let mut out = FockVector::zeros(self.dim);
        for (i, (fi, w)) in f.iter().zip(grid.weights()).enumerate() {
            let c = fi * (w.sqrt() * scale);
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let cc = c.conj();
            let base = i * self.dim;
            for (s, x) in v.iter().enumerate() {
                if *x == C64::new(0.0, 0.0) {
                    continue;
                }
                let n = self.occ[s * self.modes + i] as usize;
                if create {
                    let t = self.raise[base + s];
                    if t != NONE {
                        out[t as usize] += c * self.sqrt[n + 1] * x;
                    }
                }
                if annihilate {
                    let t = self.lower[base + s];
                    if t != NONE {
                        out[t as usize] += cc * self.sqrt[n] * x;
                    }
                }
            }
        }
        out
    }

    /// Second quantization of a diagonal one-particle operator `h`:
    /// multiplies each basis state by `sum_i n_i h_i`.
    pub fn apply_dgamma(&self, h: &[f64], v: &FockVector) -> FockVector {
        self.check_len(v);
        let mut out = v.clone();
        for (s, c) in out.as_mut_slice().iter_mut().enumerate() {
            *c *= self.dgamma_eigenvalue(h, s);
        }
        out
    }

    pub fn dgamma_eigenvalue(&self, h: &[f64], s: usize) -> f64 {
        self.occupation(s)
            .iter()
            .zip(h)
            .map(|(&n, e)| n as f64 * e)
            .sum()
    }

    /// `H_0 v = dGamma(omega) v`.
    pub fn apply_free(&self, grid: &ModeGrid, v: &FockVector) -> FockVector {
        self.apply_dgamma(grid.omega(), v)
    }

    /// `N_b v = dGamma(1) v`.
    pub fn apply_number(&self, v: &FockVector) -> FockVector {
        self.check_len(v);
        let mut out = v.clone();
        for (s, c) in out.as_mut_slice().iter_mut().enumerate() {
            *c *= self.grade[s] as f64;
        }
        out
    }

    /// `H_0^{1/2} v`.
    pub fn apply_free_sqrt(&self, grid: &ModeGrid, v: &FockVector) -> FockVector {
        self.check_len(v);
        let mut out = v.clone();
        for (s, c) in out.as_mut_slice().iter_mut().enumerate() {
            *c *= self.dgamma_eigenvalue(grid.omega(), s).sqrt();
        }
        out
    }

    /// Reduced resolvent `(H_0^perp)^{-1}`: zero on the vacuum, division by
    /// `sum_i n_i omega_i` elsewhere.
    pub fn apply_h0perp_inverse(&self, grid: &ModeGrid, v: &FockVector) -> FockVector {
        self.check_len(v);
        let mut out = v.clone();
        out[0] = C64::new(0.0, 0.0);
        for s in 1..self.dim {
            out[s] /= self.dgamma_eigenvalue(grid.omega(), s);
        }
        out
    }

    pub fn project_vacuum(&self, v: &FockVector, which: VacuumProjection) -> FockVector {
        self.check_len(v);
        match which {
            VacuumProjection::Vacuum => {
                let mut out = FockVector::zeros(self.dim);
                out[0] = v[0];
                out
            }
            VacuumProjection::Complement => {
                let mut out = v.clone();
                out[0] = C64::new(0.0, 0.0);
                out
            }
        }
    }

    /// Projection onto grades `<= max_grade`.
    pub fn truncate_to_grade(&self, v: &FockVector, max_grade: usize) -> FockVector {
        self.check_len(v);
        let mut out = v.clone();
        let start = self.grade_range(max_grade.min(self.n_max)).end;
        for c in &mut out.as_mut_slice()[start..] {
            *c = C64::new(0.0, 0.0);
        }
        out
    }

    /// Squared norm carried by grades strictly above `grade`.
    pub fn weight_above_grade(&self, v: &FockVector, grade: usize) -> f64 {
        self.check_len(v);
        if grade >= self.n_max {
            return 0.0;
        }
        v.as_slice()[self.grade_range(grade + 1).start..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Largest grade currently carrying weight (0 for the zero vector).
    pub fn max_grade(&self, v: &FockVector) -> usize {
        v.iter()
            .rposition(|c| *c != C64::new(0.0, 0.0))
            .map_or(0, |s| self.grade(s))
    }

    /// Unit vector with standard complex normal coefficients on grades
    /// `<= max_grade` and zeros above.
    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R, max_grade: usize) -> FockVector {
        let end = self.grade_range(max_grade.min(self.n_max)).end;
        let mut v = FockVector::zeros(self.dim);
        for c in &mut v.as_mut_slice()[..end] {
            *c = random_complex(rng);
        }
        v.normalize();
        v
    }
}

/// Standard complex normal sample: real and imaginary parts N(0, 1/2).
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn push_compositions(current: &mut [u8], pos: usize, remaining: usize, out: &mut Vec<u8>) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u8;
        out.extend_from_slice(current);
        return;
    }
    for v in 0..=remaining {
        current[pos] = v as u8;
        push_compositions(current, pos + 1, remaining - v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CutoffSpec, GridSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_mode_grid(omega: f64) -> ModeGrid {
        let spec = GridSpec::Explicit {
            modes: vec![vec![0.0]],
            weights: vec![1.0],
        };
        ModeGrid::build(1, omega, &spec, &CutoffSpec::indicator(0.0, 1.0)).unwrap()
    }

    #[test]
    fn dimensions_match_binomials() {
        let b = FockBasis::enumerate(1, 2).unwrap();
        assert_eq!(b.dim(), 3);
        let states: Vec<&[u8]> = (0..3).map(|s| b.occupation(s)).collect();
        assert_eq!(states, vec![&[0u8][..], &[1], &[2]]);
        assert_eq!(FockBasis::enumerate(2, 2).unwrap().dim(), 6);
        assert_eq!(FockBasis::enumerate(3, 8).unwrap().dim(), 165);
        assert_eq!(basis_dimension(3, 12), 455);
    }

    #[test]
    fn order_is_graded_lexicographic() {
        let b = FockBasis::enumerate(2, 2).unwrap();
        let states: Vec<Vec<u8>> = (0..b.dim()).map(|s| b.occupation(s).to_vec()).collect();
        assert_eq!(
            states,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0]
            ]
        );
        assert_eq!(b.grade_range(1), 1..3);
        assert_eq!(b.grade_range(3), 6..6);
    }

    #[test]
    fn rank_is_inverse_of_enumeration() {
        let b = FockBasis::enumerate(4, 5).unwrap();
        for s in 0..b.dim() {
            assert_eq!(b.rank(b.occupation(s)), Some(s));
        }
        assert_eq!(b.rank(&[6, 0, 0, 0]), None);
        assert_eq!(b.rank(&[0, 0]), None);
    }

    #[test]
    fn oversized_basis_is_rejected() {
        let err = FockBasis::enumerate_with_limit(10, 10, 1000);
        assert!(matches!(
            err,
            Err(Error::BasisTooLarge {
                dimension: 184_756,
                limit: 1000
            })
        ));
    }

    #[test]
    fn creation_on_vacuum_and_top_grade() {
        let b = FockBasis::enumerate(1, 4).unwrap();
        let up = b.apply_creation(0, &FockVector::vacuum(b.dim()));
        assert_eq!(up, FockVector::unit(b.dim(), 1));
        let top = FockVector::unit(b.dim(), 4).scaled(C64::new(2.0, 0.0));
        let (out, dropped) = b.apply_creation_tracked(0, &top);
        assert_eq!(out.norm(), 0.0);
        assert_eq!(dropped, 5.0 * 4.0);
    }

    #[test]
    fn annihilation_ladder_amplitudes() {
        let b = FockBasis::enumerate(1, 4).unwrap();
        assert_eq!(
            b.apply_annihilation(0, &FockVector::vacuum(b.dim())).norm(),
            0.0
        );
        let out = b.apply_annihilation(0, &FockVector::unit(b.dim(), 2));
        assert!((out[1].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(out.norm_sqr(), out[1].norm_sqr());
    }

    #[test]
    fn commutator_is_identity_below_top_grade() {
        let b = FockBasis::enumerate(3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = b.random_vector(&mut rng, 4);
        for i in 0..3 {
            for j in 0..3 {
                let lhs = &b.apply_annihilation(i, &b.apply_creation(j, &v))
                    - &b.apply_creation(j, &b.apply_annihilation(i, &v));
                let expected = if i == j {
                    v.clone()
                } else {
                    FockVector::zeros(b.dim())
                };
                assert!((&lhs - &expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn smeared_creation_on_vacuum_has_norm_of_f() {
        let spec = GridSpec::Explicit {
            modes: vec![vec![-1.0], vec![1.0]],
            weights: vec![0.5, 2.0],
        };
        let grid = ModeGrid::build(1, 1.0, &spec, &CutoffSpec::indicator(0.0, 5.0)).unwrap();
        let b = FockBasis::enumerate(2, 3).unwrap();
        let mut f = vec![C64::new(1.0, 1.0), C64::new(-0.5, 2.0)];
        let n = grid.norm_sq(&f).sqrt();
        f.iter_mut().for_each(|c| *c /= n);
        let vac = FockVector::vacuum(b.dim());
        let created = b.apply_smeared(&grid, &f, &vac, Ladder::Create);
        assert!((created.norm() - 1.0).abs() < 1e-15);
        let segal = b.apply_smeared(&grid, &f, &vac, Ladder::Segal);
        assert!((segal.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn free_hamiltonian_and_number() {
        let spec = GridSpec::Explicit {
            modes: vec![vec![0.0], vec![2.0]],
            weights: vec![1.0, 1.0],
        };
        let grid = ModeGrid::build(1, 1.0, &spec, &CutoffSpec::indicator(0.0, 5.0)).unwrap();
        let b = FockBasis::enumerate(2, 3).unwrap();
        let vac = FockVector::vacuum(b.dim());
        assert_eq!(b.apply_free(&grid, &vac).norm(), 0.0);
        let one_two = b.rank(&[1, 1]).unwrap();
        let v = FockVector::unit(b.dim(), one_two);
        let hv = b.apply_free(&grid, &v);
        assert!((hv[one_two].re - (1.0 + 5f64.sqrt())).abs() < 1e-15);
        let three = b.rank(&[3, 0]).unwrap();
        assert_eq!(
            b.apply_number(&FockVector::unit(b.dim(), three))[three].re,
            3.0
        );
    }

    #[test]
    fn reduced_resolvent() {
        let grid = single_mode_grid(2.0);
        let b = FockBasis::enumerate(1, 3).unwrap();
        assert_eq!(
            b.apply_h0perp_inverse(&grid, &FockVector::vacuum(b.dim()))
                .norm(),
            0.0
        );
        let out = b.apply_h0perp_inverse(&grid, &FockVector::unit(b.dim(), 1));
        assert_eq!(out[1].re, 0.5);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = b.random_vector(&mut rng, 3);
        let perp = b.project_vacuum(&v, VacuumProjection::Complement);
        let back = b.apply_free(&grid, &b.apply_h0perp_inverse(&grid, &perp));
        assert!((&back - &perp).norm() < 1e-15);
    }

    #[test]
    fn vacuum_projections_resolve_identity() {
        let b = FockBasis::enumerate(2, 3).unwrap();
        let vac = FockVector::vacuum(b.dim());
        assert_eq!(b.project_vacuum(&vac, VacuumProjection::Vacuum), vac);
        assert_eq!(
            b.project_vacuum(&vac, VacuumProjection::Complement).norm(),
            0.0
        );
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = b.random_vector(&mut rng, 3);
        let sum = &b.project_vacuum(&v, VacuumProjection::Vacuum)
            + &b.project_vacuum(&v, VacuumProjection::Complement);
        assert_eq!(sum, v);
    }

    #[test]
    fn random_vectors_respect_grade_limit() {
        let b = FockBasis::enumerate(3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = b.random_vector(&mut rng, 2);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert_eq!(b.max_grade(&v), 2);
        assert_eq!(b.weight_above_grade(&v, 2), 0.0);
        assert!(b.weight_above_grade(&v, 1) > 0.0);
    }
}
