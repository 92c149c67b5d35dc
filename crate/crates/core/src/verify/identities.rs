//! Canonical commutation relations and the commutators with `H_0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{interior_vector, no_room, random_test_function, CheckOutcome, Residual, IDENTITY_TOL};
use crate::fock::{FockVector, Ladder};
use crate::hamiltonian::HamiltonianSet;
use crate::operator::LinearOperator;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// All identity checks on `samples` random vectors each.
pub fn run_identity_suite(
    set: &HamiltonianSet<'_>,
    samples: usize,
    seed: u64,
) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = check_ccr(set, samples, &mut rng);
    out.extend(check_commutators(set, samples, &mut rng));
    out.push(check_double_commutator(set, None, samples, &mut rng));
    out.extend(check_weak_commutator(set, samples, &mut rng));
    out.push(check_field_commutation(set, samples, &mut rng));
    out
}

fn detail(samples: usize, reach: usize, n_max: usize) -> String {
    format!("{samples} vectors on grades <= {}", n_max - reach)
}

/// `[a(f), a^dagger(g)] = (f, g)` and `[a(f), a(g)] = [a^dagger(f), a^dagger(g)] = 0`.
pub fn check_ccr<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    samples: usize,
    rng: &mut R,
) -> Vec<CheckOutcome> {
    let (basis, grid) = (set.basis, set.grid);
    let n_max = basis.n_max();
    let ladder = |f: &[C64], v: &FockVector, which| basis.apply_smeared(grid, f, v, which);
    let mut out = Vec::new();
    for (name, reach) in [("ccr1", 1), ("ccr2_annihilation", 0), ("ccr2_creation", 2)] {
        if n_max < reach {
            out.push(no_room(name, basis, reach));
            continue;
        }
        let mut worst = Residual::new();
        for _ in 0..samples {
            let f = random_test_function(basis.modes(), rng);
            let g = random_test_function(basis.modes(), rng);
            let v = interior_vector(basis, reach, rng).expect("room checked above");
            let (x, y, rhs) = match name {
                "ccr1" => (
                    ladder(&f, &ladder(&g, &v, Ladder::Create), Ladder::Annihilate),
                    ladder(&g, &ladder(&f, &v, Ladder::Annihilate), Ladder::Create),
                    v.scaled(grid.inner(&f, &g)),
                ),
                "ccr2_annihilation" => (
                    ladder(&f, &ladder(&g, &v, Ladder::Annihilate), Ladder::Annihilate),
                    ladder(&g, &ladder(&f, &v, Ladder::Annihilate), Ladder::Annihilate),
                    FockVector::zeros(v.len()),
                ),
                _ => (
                    ladder(&f, &ladder(&g, &v, Ladder::Create), Ladder::Create),
                    ladder(&g, &ladder(&f, &v, Ladder::Create), Ladder::Create),
                    FockVector::zeros(v.len()),
                ),
            };
            let diff = (&(&x - &y) - &rhs).norm();
            worst.record(diff, x.norm() + y.norm() + rhs.norm());
        }
        out.push(CheckOutcome::residual(
            name,
            worst.0,
            IDENTITY_TOL,
            detail(samples, reach, n_max),
        ));
    }
    out
}

/// `[a(f), H_0] = a(omega f)`, `[a^dagger(f), H_0] = -a^dagger(omega f)` and
/// `[phi_S(f), H_0] = i phi_S(i omega f)`.
pub fn check_commutators<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    samples: usize,
    rng: &mut R,
) -> Vec<CheckOutcome> {
    let (basis, grid) = (set.basis, set.grid);
    let n_max = basis.n_max();
    let h0 = &set.free;
    let mut out = Vec::new();
    let cases = [
        ("comm_a_h0", Ladder::Annihilate, 0),
        ("comm_adag_h0", Ladder::Create, 1),
        ("comm_phi_h0", Ladder::Segal, 1),
    ];
    for (name, which, reach) in cases {
        if n_max < reach {
            out.push(no_room(name, basis, reach));
            continue;
        }
        let mut worst = Residual::new();
        for _ in 0..samples {
            let f = random_test_function(basis.modes(), rng);
            let omega_f: Vec<C64> = f.iter().zip(grid.omega()).map(|(c, w)| c * w).collect();
            let v = interior_vector(basis, reach, rng).expect("room checked above");
            let x = basis.apply_smeared(grid, &f, &h0.apply(&v), which);
            let y = h0.apply(&basis.apply_smeared(grid, &f, &v, which));
            let rhs = match which {
                Ladder::Annihilate => basis.apply_smeared(grid, &omega_f, &v, which),
                Ladder::Create => basis
                    .apply_smeared(grid, &omega_f, &v, which)
                    .scaled(C64::new(-1.0, 0.0)),
                Ladder::Segal => {
                    let i_omega_f: Vec<C64> = omega_f.iter().map(|c| I * c).collect();
                    basis.apply_smeared(grid, &i_omega_f, &v, which).scaled(I)
                }
            };
            let diff = (&(&x - &y) - &rhs).norm();
            worst.record(diff, x.norm() + y.norm() + rhs.norm());
        }
        out.push(CheckOutcome::residual(
            name,
            worst.0,
            IDENTITY_TOL,
            detail(samples, reach, n_max),
        ));
    }
    out
}

/// `[phi_S(f)^2, [phi_S(f)^2, H_0]] = -4 (f, omega f) phi_S(f)^2`, with `f`
/// random or fixed.
pub fn check_double_commutator<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    f: Option<&[C64]>,
    samples: usize,
    rng: &mut R,
) -> CheckOutcome {
    let name = "double_commutator";
    let (basis, grid) = (set.basis, set.grid);
    if basis.n_max() < 4 {
        return no_room(name, basis, 4);
    }
    let h0 = &set.free;
    let mut worst = Residual::new();
    for _ in 0..samples {
        let f: Vec<C64> =
            f.map_or_else(|| random_test_function(basis.modes(), rng), <[C64]>::to_vec);
        let omega_f: Vec<C64> = f.iter().zip(grid.omega()).map(|(c, w)| c * w).collect();
        let v = interior_vector(basis, 4, rng).expect("room checked above");
        let y = |u: &FockVector| {
            let once = basis.apply_smeared(grid, &f, u, Ladder::Segal);
            basis.apply_smeared(grid, &f, &once, Ladder::Segal)
        };
        let yv = y(&v);
        let t1 = y(&y(&h0.apply(&v)));
        let t2 = y(&h0.apply(&yv)).scaled(C64::new(2.0, 0.0));
        let t3 = h0.apply(&y(&yv));
        let rhs = yv.scaled(-4.0 * grid.inner(&f, &omega_f));
        let lhs = &(&t1 - &t2) + &t3;
        worst.record(
            (&lhs - &rhs).norm(),
            t1.norm() + t2.norm() + t3.norm() + rhs.norm(),
        );
    }
    CheckOutcome::residual(
        name,
        worst.0,
        IDENTITY_TOL,
        detail(samples, 4, basis.n_max()),
    )
}

/// Weak commutators `[phi(x)^4, a(f)]^0(Phi, Psi) = -2 sqrt2 (f, rho_{b,x}) (Phi, phi(x)^3 Psi)`
/// at the quadrature nodes, and the integrated form for `H_I`.
pub fn check_weak_commutator<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    samples: usize,
    rng: &mut R,
) -> Vec<CheckOutcome> {
    let (basis, grid) = (set.basis, set.grid);
    let names = ["weak_commutator_phi4", "weak_commutator_interaction"];
    if basis.n_max() < 4 {
        return names.iter().map(|n| no_room(n, basis, 4)).collect();
    }
    let terms = set.interaction.terms();
    let k = -2.0 * std::f64::consts::SQRT_2;
    let (mut node_worst, mut total_worst) = (Residual::new(), Residual::new());
    for s in 0..samples {
        let f = random_test_function(basis.modes(), rng);
        let phi = interior_vector(basis, 4, rng).expect("room checked above");
        let psi = interior_vector(basis, 4, rng).expect("room checked above");
        let a_psi = basis.apply_smeared(grid, &f, &psi, Ladder::Annihilate);
        let adag_phi = basis.apply_smeared(grid, &f, &phi, Ladder::Create);

        let (_, field) = &terms[s % terms.len()];
        let t1 = field.power(&phi, 4).dot(&a_psi);
        let t2 = adag_phi.dot(&field.power(&psi, 4));
        let rhs = k * grid.inner(&f, field.smearing()) * phi.dot(&field.power(&psi, 3));
        node_worst.record((t1 - t2 - rhs).norm(), t1.norm() + t2.norm() + rhs.norm());

        let u1 = set.apply_hi(&phi).dot(&a_psi);
        let u2 = adag_phi.dot(&set.apply_hi(&psi));
        let mut rhs = C64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (c, field) in terms {
            let term = *c * k * grid.inner(&f, field.smearing()) * phi.dot(&field.power(&psi, 3));
            scale += term.norm();
            rhs += term;
        }
        total_worst.record((u1 - u2 - rhs).norm(), u1.norm() + u2.norm() + scale);
    }
    let d = detail(samples, 4, basis.n_max());
    vec![
        CheckOutcome::residual(names[0], node_worst.0, IDENTITY_TOL, d.clone()),
        CheckOutcome::residual(names[1], total_worst.0, IDENTITY_TOL, d),
    ]
}

/// `[phi(x), phi(x')] = i Im (rho_{b,x}, rho_{b,x'})` over random node pairs.
/// The right side vanishes on reflection-symmetric grids.
pub fn check_field_commutation<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    samples: usize,
    rng: &mut R,
) -> CheckOutcome {
    let name = "field_commutation";
    let basis = set.basis;
    if basis.n_max() < 2 {
        return no_room(name, basis, 2);
    }
    let terms = set.interaction.terms();
    let mut worst = Residual::new();
    let mut largest_c_number: f64 = 0.0;
    for _ in 0..samples {
        let (_, p) = &terms[rng.random_range(0..terms.len())];
        let (_, q) = &terms[rng.random_range(0..terms.len())];
        let v = interior_vector(basis, 2, rng).expect("room checked above");
        let x = p.apply(&q.apply(&v));
        let y = q.apply(&p.apply(&v));
        let c = set.grid.inner(p.smearing(), q.smearing()).im;
        largest_c_number = largest_c_number.max(c.abs());
        let rhs = v.scaled(C64::new(0.0, c));
        worst.record((&(&x - &y) - &rhs).norm(), x.norm() + y.norm() + rhs.norm());
    }
    let symmetric = if set.grid.is_reflection_symmetric() {
        "symmetric grid"
    } else {
        "asymmetric grid"
    };
    CheckOutcome::residual(
        name,
        worst.0,
        IDENTITY_TOL,
        format!(
            "{}, {symmetric}, max |Im(rho_x, rho_y)| = {largest_c_number:.3e}",
            detail(samples, 2, basis.n_max())
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CutoffSpec, GridSpec, QuadratureSpec};
    use crate::model::Model;

    fn model(modes: Vec<f64>, n_max: usize) -> Model {
        let n = modes.len();
        Model::build(
            1,
            1.0,
            &GridSpec::Explicit {
                modes: modes.into_iter().map(|k| vec![k]).collect(),
                weights: vec![0.7; n],
            },
            &CutoffSpec::gaussian(0.0, 2.0, 1.0),
            &CutoffSpec::indicator(0.0, 1.0),
            &QuadratureSpec::Trapezoid { nodes: 5 },
            n_max,
            usize::MAX,
        )
        .unwrap()
    }

    #[test]
    fn suite_passes_on_symmetric_and_asymmetric_grids() {
        for modes in [vec![-1.5, 0.0, 1.5], vec![-0.4, 0.9, 2.0]] {
            let m = model(modes, 6);
            for outcome in run_identity_suite(&m.hamiltonians(), 20, 1) {
                assert!(outcome.passed(), "{outcome}");
            }
        }
    }

    #[test]
    fn zero_test_function_gives_zero_double_commutator() {
        let m = model(vec![-1.0, 1.0], 6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let zero = vec![C64::new(0.0, 0.0); 2];
        let out = check_double_commutator(&m.hamiltonians(), Some(&zero), 3, &mut rng);
        assert_eq!(out.measured, 0.0);
    }

    #[test]
    fn truncation_breaks_identities_at_the_top() {
        let m = model(vec![0.0], 4);
        let basis = &m.basis;
        let top = FockVector::unit(basis.dim(), basis.dim() - 1);
        let f = vec![C64::new(1.0, 0.0)];
        let x = basis.apply_smeared(
            &m.grid,
            &f,
            &basis.apply_smeared(&m.grid, &f, &top, Ladder::Create),
            Ladder::Annihilate,
        );
        let y = basis.apply_smeared(
            &m.grid,
            &f,
            &basis.apply_smeared(&m.grid, &f, &top, Ladder::Annihilate),
            Ladder::Create,
        );
        let defect = (&(&x - &y) - &top.scaled(m.grid.inner(&f, &f))).norm();
        assert!(defect > 1.0);
    }

    #[test]
    fn too_small_truncation_is_skipped() {
        let m = model(vec![0.0, 1.0], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = check_double_commutator(&m.hamiltonians(), None, 1, &mut rng);
        assert_eq!(out.status, super::super::CheckStatus::Skipped);
    }
}
