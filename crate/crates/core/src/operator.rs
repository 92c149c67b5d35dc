//! Matrix-free linear operators on Fock vectors.

use rand::Rng;

use crate::fock::{random_complex, FockVector};
use crate::C64;

pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&self, v: &FockVector) -> FockVector;

    fn is_hermitian(&self) -> bool {
        true
    }

    fn describe(&self) -> String;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        (**self).apply(v)
    }

    fn is_hermitian(&self) -> bool {
        (**self).is_hermitian()
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

type ApplyFn<'a> = dyn Fn(&FockVector) -> FockVector + Send + Sync + 'a;

/// Operator built from a closure, for compositions that have no dedicated type.
pub struct OperatorHandle<'a> {
    dim: usize,
    hermitian: bool,
    descriptor: String,
    apply: Box<ApplyFn<'a>>,
}

impl<'a> OperatorHandle<'a> {
    pub fn new<F>(dim: usize, hermitian: bool, descriptor: impl Into<String>, apply: F) -> Self
    where
        F: Fn(&FockVector) -> FockVector + Send + Sync + 'a,
    {
        OperatorHandle {
            dim,
            hermitian,
            descriptor: descriptor.into(),
            apply: Box::new(apply),
        }
    }
}

impl LinearOperator for OperatorHandle<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &FockVector) -> FockVector {
        (self.apply)(v)
    }

    fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    fn describe(&self) -> String {
        self.descriptor.clone()
    }
}

impl std::fmt::Debug for OperatorHandle<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("dim", &self.dim)
            .field("hermitian", &self.hermitian)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> FockVector {
    let mut v = FockVector::from_coeffs((0..dim).map(|_| random_complex(rng)).collect());
    v.normalize();
    v
}

/// Power-iteration estimate of the operator norm (largest |eigenvalue| for
/// Hermitian operators).
pub fn estimate_norm<R: Rng + ?Sized>(
    op: &dyn LinearOperator,
    iterations: usize,
    rng: &mut R,
) -> f64 {
    let mut v = random_unit(op.dim(), rng);
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let mut w = op.apply(&v);
        let n = w.normalize();
        if n == 0.0 {
            return estimate;
        }
        estimate = n;
        v = w;
    }
    estimate
}

/// Largest `|<u, A v> - <A u, v>| / (|u| |v| |A|_est)` over `samples` random pairs.
pub fn hermiticity_defect<R: Rng + ?Sized>(
    op: &dyn LinearOperator,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let scale = estimate_norm(op, 30, rng).max(f64::MIN_POSITIVE);
    (0..samples)
        .map(|_| {
            let u = random_unit(op.dim(), rng);
            let v = random_unit(op.dim(), rng);
            let lhs = u.dot(&op.apply(&v));
            let rhs = op.apply(&u).dot(&v);
            (lhs - rhs).norm() / scale
        })
        .fold(0.0, f64::max)
}

/// `|A(alpha u + beta v) - alpha A u - beta A v|` relative to the input scale.
pub fn linearity_defect<R: Rng + ?Sized>(op: &dyn LinearOperator, rng: &mut R) -> f64 {
    let u = random_unit(op.dim(), rng);
    let v = random_unit(op.dim(), rng);
    let (alpha, beta): (C64, C64) = (random_complex(rng), random_complex(rng));
    let mut combo = u.scaled(alpha);
    combo.axpy(beta, &v);
    let mut expected = op.apply(&u).scaled(alpha);
    expected.axpy(beta, &op.apply(&v));
    let got = op.apply(&combo);
    (&got - &expected).norm() / expected.norm().max(got.norm()).max(f64::MIN_POSITIVE)
}
