use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub, SubAssign};

use crate::C64;

/// Complex coefficients over a [`super::FockBasis`], in basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<C64>,
}

impl FockVector {
    pub fn zeros(dim: usize) -> Self {
        FockVector {
            coeffs: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// The Fock vacuum: coefficient 1 on the empty occupation (index 0).
    pub fn vacuum(dim: usize) -> Self {
        Self::unit(dim, 0)
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coeffs[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        FockVector { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.coeffs.iter()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn dot(&self, other: &FockVector) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, alpha: C64) {
        for c in &mut self.coeffs {
            *c *= alpha;
        }
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    /// `self += alpha * x`.
    pub fn axpy(&mut self, alpha: C64, x: &FockVector) {
        debug_assert_eq!(self.len(), x.len());
        for (y, xi) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += alpha * xi;
        }
    }

    /// Rescales to unit norm; returns the previous norm. A zero vector is
    /// left untouched.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.scale(C64::new(1.0 / n, 0.0));
        }
        n
    }
}

impl Index<usize> for FockVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.coeffs[i]
    }
}

impl IndexMut<usize> for FockVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.coeffs[i]
    }
}

impl AddAssign<&FockVector> for FockVector {
    fn add_assign(&mut self, rhs: &FockVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&FockVector> for FockVector {
    fn sub_assign(&mut self, rhs: &FockVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Add<&FockVector> for &FockVector {
    type Output = FockVector;
    fn add(self, rhs: &FockVector) -> FockVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&FockVector> for &FockVector {
    type Output = FockVector;
    fn sub(self, rhs: &FockVector) -> FockVector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&FockVector> for C64 {
    type Output = FockVector;
    fn mul(self, rhs: &FockVector) -> FockVector {
        rhs.scaled(self)
    }
}

impl Mul<&FockVector> for f64 {
    type Output = FockVector;
    fn mul(self, rhs: &FockVector) -> FockVector {
        rhs.scaled(C64::new(self, 0.0))
    }
}
