//! Operator inequalities: ladder bounds, the H-bound, the `phi^3` bounds,
//! the boson number bound and the vacuum overlap.
//!
//! Every quantity is evaluated on vectors for which each operator product
//! involved is computed without truncation error, so the inequalities are
//! statements about the untruncated operators and must hold exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{interior_vector, no_room, random_test_function, CheckOutcome, Worst, INEQUALITY_TOL};
use crate::fock::{FockBasis, FockVector, Ladder};
use crate::hamiltonian::HamiltonianSet;
use crate::operator::LinearOperator;
use crate::spectral::SpectralResult;
use crate::theory::{hbound_constants, EpsilonFamily};
use crate::C64;

/// Parameters shared by the inequality checks.
#[derive(Debug, Clone, Copy)]
pub struct InequalityContext<'a> {
    pub kappa: f64,
    pub family: EpsilonFamily,
    pub state: Option<&'a SpectralResult>,
    pub samples: usize,
    pub seed: u64,
}

/// Reach of `H_I`: every operator product below raises by at most 4.
const QUARTIC_REACH: usize = 4;

pub fn run_inequality_suite(
    set: &HamiltonianSet<'_>,
    ctx: &InequalityContext<'_>,
) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = check_ladder_bounds(set, ctx.samples, &mut rng);
    out.push(check_double_commutator_bound(set, ctx.samples, &mut rng));
    out.extend(check_hbound(
        set,
        ctx.kappa,
        &ctx.family,
        ctx.samples,
        &mut rng,
    ));
    let mut vectors: Vec<FockVector> = Vec::new();
    if let Some(state) = ctx.state {
        if let Some(g) = set.basis.n_max().checked_sub(QUARTIC_REACH) {
            let mut v = set.basis.truncate_to_grade(&state.ground_vector, g);
            if v.normalize() > 0.0 {
                vectors.push(v);
            }
        }
    }
    for _ in 0..ctx.samples {
        match interior_vector(set.basis, QUARTIC_REACH, &mut rng) {
            Some(v) => vectors.push(v),
            None => break,
        }
    }
    out.extend(check_phi3_bound(set, ctx.kappa, &ctx.family, &vectors));
    if let Some(state) = ctx.state {
        out.extend(check_number_bound(set, state, &ctx.family));
        out.extend(check_overlap(set.basis, state, Some(&ctx.family)));
    }
    let random: Vec<FockVector> = (0..ctx.samples)
        .map(|_| set.basis.random_vector(&mut rng, 2))
        .collect();
    out.push(check_overlap_on("overlap_lemma_random", set.basis, &random));
    out
}

fn weighted_norm(set: &HamiltonianSet<'_>, f: &[C64], power: f64) -> f64 {
    let g = set.grid;
    g.weights()
        .iter()
        .zip(f)
        .zip(g.omega())
        .map(|((w, c), o)| w * c.norm_sqr() * o.powf(power))
        .sum::<f64>()
        .sqrt()
}

/// `||a(f) Psi|| <= ||f/sqrt(omega)|| ||H_0^{1/2} Psi||`,
/// `||a^dagger(f) Psi|| <= ||f/sqrt(omega)|| ||H_0^{1/2} Psi|| + ||f|| ||Psi||` and
/// `||phi_S(f) Psi|| <= sqrt2 ||f/sqrt(omega)|| ||H_0^{1/2} Psi|| + ||f||/sqrt2 ||Psi||`.
pub fn check_ladder_bounds<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    samples: usize,
    rng: &mut R,
) -> Vec<CheckOutcome> {
    let basis = set.basis;
    let mut out = Vec::new();
    for (name, which, reach) in [
        ("a_bound", Ladder::Annihilate, 0),
        ("adag_bound", Ladder::Create, 1),
        ("phi_bound", Ladder::Segal, 1),
    ] {
        if basis.n_max() < reach {
            out.push(no_room(name, basis, reach));
            continue;
        }
        let mut worst = Worst::new();
        for _ in 0..samples {
            let f = random_test_function(basis.modes(), rng);
            let psi = interior_vector(basis, reach, rng).expect("room checked above");
            let f_low = weighted_norm(set, &f, -1.0);
            let f_norm = weighted_norm(set, &f, 0.0);
            let h0_half = psi.dot(&set.free.apply(&psi)).re.max(0.0).sqrt();
            let lhs = basis.apply_smeared(set.grid, &f, &psi, which).norm();
            let rhs = match which {
                Ladder::Annihilate => f_low * h0_half,
                Ladder::Create => f_low * h0_half + f_norm * psi.norm(),
                Ladder::Segal => {
                    std::f64::consts::SQRT_2 * f_low * h0_half
                        + f_norm / std::f64::consts::SQRT_2 * psi.norm()
                }
            };
            worst.record(lhs, rhs);
        }
        out.push(CheckOutcome::inequality(
            name,
            worst.0,
            INEQUALITY_TOL,
            format!("{samples} vectors on grades <= {}", basis.n_max() - reach),
        ));
    }
    out
}

/// `|<Phi, [phi_S(f)^2, [phi_S(f)^2, H_0]] Phi>|
///   <= 4 ||omega^{1/2} f||^2 (4 ||f/sqrt(omega)||^2 ||H_0^{1/2} Phi||^2 + ||f||^2 ||Phi||^2)`
/// for random `f` and for the smeared field profiles at the quadrature nodes.
pub fn check_double_commutator_bound<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    samples: usize,
    rng: &mut R,
) -> CheckOutcome {
    let name = "double_commutator_bound";
    let (basis, grid) = (set.basis, set.grid);
    if basis.n_max() < 4 {
        return no_room(name, basis, 4);
    }
    let terms = set.interaction.terms();
    let mut worst = Worst::new();
    for s in 0..samples {
        let f: Vec<C64> = if s % 2 == 0 {
            random_test_function(basis.modes(), rng)
        } else {
            terms[(s / 2) % terms.len()].1.smearing().to_vec()
        };
        let phi = interior_vector(basis, 4, rng).expect("room checked above");
        let y = |u: &FockVector| {
            let once = basis.apply_smeared(grid, &f, u, Ladder::Segal);
            basis.apply_smeared(grid, &f, &once, Ladder::Segal)
        };
        let h0 = |u: &FockVector| set.free.apply(u);
        // <Phi, (Y Y H0 - 2 Y H0 Y + H0 Y Y) Phi> with Y Hermitian.
        let yphi = y(&phi);
        let value =
            yphi.dot(&y(&h0(&phi))) - yphi.dot(&h0(&yphi)).scale(2.0) + h0(&phi).dot(&y(&yphi));
        let h0_half_sq = phi.dot(&h0(&phi)).re;
        let rhs = 4.0
            * weighted_norm(set, &f, 1.0).powi(2)
            * (4.0 * weighted_norm(set, &f, -1.0).powi(2) * h0_half_sq
                + weighted_norm(set, &f, 0.0).powi(2) * phi.norm_sqr());
        worst.record(value.norm(), rhs);
    }
    CheckOutcome::inequality(
        name,
        worst.0,
        INEQUALITY_TOL,
        format!(
            "{samples} vectors on grades <= {}, random and field profiles",
            basis.n_max() - 4
        ),
    )
}

/// The H-bound in both forms:
/// `(1 - c_bos eps kappa) ||H_0 Psi||^2 + ||kappa H_I Psi||^2 <= ||H Psi||^2 + (4 d_bos + c_bos/(4 eps)) kappa ||Psi||^2`
/// and `||H_0 Psi||^2 + ||kappa H_I Psi||^2 <= lambda ||H Psi||^2 + mu ||Psi||^2`.
pub fn check_hbound<R: Rng + ?Sized>(
    set: &HamiltonianSet<'_>,
    kappa: f64,
    family: &EpsilonFamily,
    samples: usize,
    rng: &mut R,
) -> Vec<CheckOutcome> {
    let names = ["hbound_proposition", "hbound_corollary"];
    let basis = set.basis;
    let h = match set.h_kappa(kappa) {
        Ok(h) => h,
        Err(e) => {
            return names
                .iter()
                .map(|n| CheckOutcome::skipped(*n, e.to_string()))
                .collect()
        }
    };
    if basis.n_max() < QUARTIC_REACH {
        return names
            .iter()
            .map(|n| no_room(n, basis, QUARTIC_REACH))
            .collect();
    }
    let (c_bos, d_bos) = hbound_constants(set.grid, set.quadrature);
    let eps = family.epsilon;
    let (mut prop, mut cor) = (Worst::new(), Worst::new());
    for s in 0..samples {
        let psi = if s == 0 {
            FockVector::vacuum(basis.dim())
        } else {
            interior_vector(basis, QUARTIC_REACH, rng).expect("room checked above")
        };
        let h0 = set.free.apply(&psi).norm_sqr();
        let hi = set.apply_hi(&psi).norm_sqr() * kappa * kappa;
        let hk = h.apply(&psi).norm_sqr();
        let n = psi.norm_sqr();
        prop.record(
            (1.0 - c_bos * eps * kappa) * h0 + hi,
            hk + (4.0 * d_bos + c_bos / (4.0 * eps)) * kappa * n,
        );
        cor.record(h0 + hi, family.lambda * hk + family.mu * n);
    }
    let d = format!(
        "kappa = {kappa}, eps = {eps:.6e}, {samples} vectors on grades <= {} (first is the vacuum)",
        basis.n_max() - QUARTIC_REACH
    );
    vec![
        CheckOutcome::inequality(names[0], prop.0, INEQUALITY_TOL, d.clone()),
        CheckOutcome::inequality(names[1], cor.0, INEQUALITY_TOL, d),
    ]
}

/// Pointwise `|(phi(x)^3 Phi, phi(y)^3 Phi)| <= (phi(x)^4 Phi, phi(y)^4 Phi) + ||Phi||^2 / 2`
/// at every node pair, the intermediate
/// `kappa^2 sum c_x c_y |(phi(x)^3 Phi, phi(y)^3 Phi)| <= ||kappa H_I Phi||^2 + kappa^2 ||chi_I||_1^2 ||Phi||^2 / 2`
/// and the integrated bound with `lambda ||H Phi||^2 + (mu + kappa^2 ||chi_I||_1^2 / 2) ||Phi||^2`.
pub fn check_phi3_bound(
    set: &HamiltonianSet<'_>,
    kappa: f64,
    family: &EpsilonFamily,
    vectors: &[FockVector],
) -> Vec<CheckOutcome> {
    let names = [
        "phi3_pointwise",
        "phi3_interaction_bound",
        "phi3_integrated",
    ];
    let h = match set.h_kappa(kappa) {
        Ok(h) => h,
        Err(e) => {
            return names
                .iter()
                .map(|n| CheckOutcome::skipped(*n, e.to_string()))
                .collect()
        }
    };
    if vectors.is_empty() {
        return names
            .iter()
            .map(|n| no_room(n, set.basis, QUARTIC_REACH))
            .collect();
    }
    let terms = set.interaction.terms();
    let l1 = set.quadrature.chi_l1();
    let (mut pointwise, mut middle, mut integrated) = (Worst::new(), Worst::new(), Worst::new());
    let mut worst_imag: f64 = 0.0;
    for phi in vectors {
        let cubes: Vec<FockVector> = terms.iter().map(|(_, f)| f.power(phi, 3)).collect();
        let quartics: Vec<FockVector> = terms.iter().map(|(_, f)| f.power(phi, 4)).collect();
        let n = phi.norm_sqr();
        let mut double_sum = 0.0;
        for j in 0..terms.len() {
            for k in 0..terms.len() {
                let lhs = cubes[j].dot(&cubes[k]).norm();
                let q = quartics[j].dot(&quartics[k]);
                worst_imag = worst_imag.max(q.im.abs() / q.norm().max(f64::MIN_POSITIVE));
                pointwise.record(lhs, q.re + 0.5 * n);
                double_sum += terms[j].0 * terms[k].0 * lhs;
            }
        }
        let lhs = kappa * kappa * double_sum;
        let hi = set.apply_hi(phi).norm_sqr() * kappa * kappa;
        middle.record(lhs, hi + 0.5 * kappa * kappa * l1 * l1 * n);
        let hk = h.apply(phi).norm_sqr();
        integrated.record(
            lhs,
            family.lambda * hk + (family.mu + 0.5 * kappa * kappa * l1 * l1) * n,
        );
    }
    let d = format!(
        "kappa = {kappa}, {} vectors, {} node pairs, max |Im (phi^4, phi^4)| rel {worst_imag:.1e}",
        vectors.len(),
        terms.len() * terms.len()
    );
    vec![
        CheckOutcome::inequality(names[0], pointwise.0, INEQUALITY_TOL, d.clone()),
        CheckOutcome::inequality(names[1], middle.0, INEQUALITY_TOL, d.clone()),
        CheckOutcome::inequality(names[2], integrated.0, INEQUALITY_TOL, d),
    ]
}

/// `<Omega, N_b Omega> <= c_{eps,kappa}`, plus the cross-check
/// `<Omega, N_b Omega> = sum_i ||a_i Omega||^2`.
pub fn check_number_bound(
    set: &HamiltonianSet<'_>,
    state: &SpectralResult,
    family: &EpsilonFamily,
) -> Vec<CheckOutcome> {
    let basis = set.basis;
    let omega = &state.ground_vector;
    let n_expect = omega.dot(&basis.apply_number(omega)).re;
    let mode_sum: f64 = (0..basis.modes())
        .map(|i| basis.apply_annihilation(i, omega).norm_sqr())
        .sum();
    let mut bound = Worst::new();
    bound.record_with_floor(n_expect, family.c_number, 1.0);
    vec![
        CheckOutcome::inequality(
            "number_bound",
            bound.0,
            INEQUALITY_TOL,
            format!(
                "<N> = {n_expect:.6e}, c = {:.6e}, eps = {:.6e}",
                family.c_number, family.epsilon
            ),
        ),
        CheckOutcome::residual(
            "number_cross_check",
            (n_expect - mode_sum).abs() / n_expect.abs().max(f64::MIN_POSITIVE),
            1e-12,
            format!("sum_i ||a_i Omega||^2 = {mode_sum:.6e}"),
        ),
    ]
}

/// `|(Omega_0, Phi)|^2 >= 1 - <Phi, N_b Phi>` on the ground state and, when
/// `1 - c_{eps,kappa} > 0`, `|(Omega_0, Omega)| >= sqrt(1 - c_{eps,kappa})`.
pub fn check_overlap(
    basis: &FockBasis,
    state: &SpectralResult,
    family: Option<&EpsilonFamily>,
) -> Vec<CheckOutcome> {
    let omega = &state.ground_vector;
    let mut out = vec![check_overlap_on(
        "overlap_lemma",
        basis,
        std::slice::from_ref(omega),
    )];
    let overlap = omega[0].norm();
    out.push(match family {
        Some(f) if f.c_number < 1.0 => {
            let mut w = Worst::new();
            w.record((1.0 - f.c_number).sqrt(), overlap);
            CheckOutcome::inequality(
                "overlap_proposition",
                w.0,
                INEQUALITY_TOL,
                format!("|(Omega_0, Omega)| = {overlap:.12}, c = {:.6e}", f.c_number),
            )
        }
        Some(f) => CheckOutcome::skipped(
            "overlap_proposition",
            format!(
                "vacuous: c = {:.6e} >= 1, |(Omega_0, Omega)| = {overlap:.12}",
                f.c_number
            ),
        ),
        None => CheckOutcome::skipped("overlap_proposition", "no epsilon family"),
    });
    out
}

/// The overlap lemma on arbitrary vectors (normalized first).
pub fn check_overlap_on(name: &str, basis: &FockBasis, vectors: &[FockVector]) -> CheckOutcome {
    let mut w = Worst::new();
    for v in vectors {
        let n2 = v.norm_sqr();
        if n2 == 0.0 {
            continue;
        }
        let number = v.dot(&basis.apply_number(v)).re / n2;
        w.record(1.0 - number, v[0].norm_sqr() / n2);
    }
    CheckOutcome::inequality(
        name,
        w.0,
        INEQUALITY_TOL,
        format!("{} vectors", vectors.len()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CutoffSpec, GridSpec, QuadratureSpec};
    use crate::model::Model;
    use crate::spectral::{ground_state, EigenOptions};
    use crate::theory::optimize_epsilon;

    fn reference(n_max: usize) -> Model {
        Model::build(
            1,
            16.0,
            &GridSpec::Uniform {
                cutoff: 3.0,
                points: 3,
            },
            &CutoffSpec::indicator(0.0, 10.0),
            &CutoffSpec::indicator(0.0, 1.0),
            &QuadratureSpec::Trapezoid { nodes: 9 },
            n_max,
            usize::MAX,
        )
        .unwrap()
    }

    #[test]
    fn overlap_lemma_equality_cases() {
        let basis = FockBasis::enumerate(2, 3).unwrap();
        let vac = FockVector::vacuum(basis.dim());
        let one = FockVector::unit(basis.dim(), 1);
        assert_eq!(check_overlap_on("x", &basis, &[vac]).measured, 0.0);
        assert_eq!(check_overlap_on("x", &basis, &[one]).measured, 0.0);
    }

    #[test]
    fn zero_coupling_hbound_is_tight() {
        let m = reference(8);
        let set = m.hamiltonians();
        let family = crate::theory::epsilon_family(1.0, 0.0, 0.0, &m.grid, &m.quadrature).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = check_hbound(&set, 0.0, &family, 10, &mut rng);
        assert!(
            out.iter().all(|o| o.passed() && o.measured.abs() < 1e-14),
            "{out:?}"
        );
    }

    #[test]
    fn suite_passes_on_reference_model() {
        let m = reference(8);
        let set = m.hamiltonians();
        let kappa = 0.05;
        let state = ground_state(
            &set.h_kappa(kappa).unwrap(),
            &m.basis,
            &EigenOptions::default(),
        )
        .unwrap();
        let family = optimize_epsilon(kappa, state.energy, &m.grid, &m.quadrature)
            .unwrap()
            .family;
        let ctx = InequalityContext {
            kappa,
            family,
            state: Some(&state),
            samples: 10,
            seed: 3,
        };
        for o in run_inequality_suite(&set, &ctx) {
            assert!(
                o.passed() || o.status == super::super::CheckStatus::Skipped,
                "{o}"
            );
        }
    }
}
