//! Property-based invariants on randomly generated small models.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phi4lab::fock::{basis_dimension, FockBasis, Ladder};
use phi4lab::grid::{CutoffSpec, GridSpec, QuadratureSpec};
use phi4lab::model::Model;
use phi4lab::operator::LinearOperator;
use phi4lab::report::format_number;
use phi4lab::spectral::{ground_state, EigenOptions};
use phi4lab::theory::{
    epsilon_family, first_order_coefficient, hbound_constants, optimize_epsilon,
};
use phi4lab::C64;

fn model_strategy(max_modes: usize, n_max: usize) -> impl Strategy<Value = Model> {
    (1..=max_modes, 0.5f64..8.0, any::<u64>()).prop_map(move |(modes, mass, seed)| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ks: Vec<Vec<f64>> = (0..modes)
            .map(|i| vec![i as f64 - 1.0 + rng.random_range(0.0..0.5)])
            .collect();
        let ws: Vec<f64> = (0..modes).map(|_| rng.random_range(0.2..2.0)).collect();
        Model::build(
            1,
            mass,
            &GridSpec::Explicit {
                modes: ks,
                weights: ws,
            },
            &CutoffSpec::gaussian(0.0, 1.5, 1.0),
            &CutoffSpec::indicator(0.0, 1.0),
            &QuadratureSpec::Trapezoid { nodes: 3 },
            n_max,
            usize::MAX,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_dimension_is_binomial(modes in 1usize..5, n_max in 0usize..7) {
        let basis = FockBasis::enumerate(modes, n_max).unwrap();
        prop_assert_eq!(basis.dim() as u128, basis_dimension(modes, n_max));
        for s in 0..basis.dim() {
            prop_assert_eq!(basis.rank(basis.occupation(s)), Some(s));
        }
    }

    #[test]
    fn operators_are_hermitian_and_interaction_is_positive(m in model_strategy(3, 5), seed in any::<u64>()) {
        let set = m.hamiltonians();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = m.basis.random_vector(&mut rng, 5);
        let v = m.basis.random_vector(&mut rng, 5);
        let ops: [&dyn LinearOperator; 3] = [&set.free, &set.interaction, &set.field(&[0.3])];
        for op in ops {
            let lhs = u.dot(&op.apply(&v));
            let rhs = v.dot(&op.apply(&u)).conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }
        prop_assert!(v.dot(&set.apply_hi(&v)).re >= 0.0);
        prop_assert!(v.dot(&set.free.apply(&v)).re >= 0.0);
    }

    #[test]
    fn ccr_holds_on_interior_vectors(m in model_strategy(3, 4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = m.basis.modes();
        let f: Vec<C64> = (0..modes).map(|_| phi4lab::fock::random_complex(&mut rng)).collect();
        let g: Vec<C64> = (0..modes).map(|_| phi4lab::fock::random_complex(&mut rng)).collect();
        let v = m.basis.random_vector(&mut rng, 3);
        let ap = |h: &[C64], x: &phi4lab::fock::FockVector, w| m.basis.apply_smeared(&m.grid, h, x, w);
        let x = ap(&f, &ap(&g, &v, Ladder::Create), Ladder::Annihilate);
        let y = ap(&g, &ap(&f, &v, Ladder::Annihilate), Ladder::Create);
        let r = &(&x - &y) - &v.scaled(m.grid.inner(&f, &g));
        prop_assert!(r.norm() <= 1e-12 * (x.norm() + y.norm() + 1.0));
    }

    #[test]
    fn ground_energy_is_sandwiched_and_monotone(m in model_strategy(2, 6), k1 in 0.0f64..0.3, dk in 0.01f64..0.3) {
        let set = m.hamiltonians();
        let c1 = first_order_coefficient(&m.grid, &m.quadrature);
        let opts = EigenOptions::default();
        let e1 = ground_state(&set.h_kappa(k1).unwrap(), &m.basis, &opts).unwrap().energy;
        let e2 = ground_state(&set.h_kappa(k1 + dk).unwrap(), &m.basis, &opts).unwrap().energy;
        prop_assert!(e1 >= -1e-12 && e1 <= c1 * k1 + 1e-12);
        prop_assert!(e2 >= e1 - 1e-10);
    }

    #[test]
    fn optimized_epsilon_beats_any_admissible_choice(m in model_strategy(3, 2), kappa in 0.001f64..0.5, t in 0.01f64..0.99, e0 in 0.0f64..2.0) {
        let (c_bos, _) = hbound_constants(&m.grid, &m.quadrature);
        let best = optimize_epsilon(kappa, e0, &m.grid, &m.quadrature).unwrap().family.c_number;
        let other = epsilon_family(t / (c_bos * kappa), kappa, e0, &m.grid, &m.quadrature).unwrap().c_number;
        prop_assert!(best <= other * (1.0 + 1e-9));
    }

    #[test]
    fn csv_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }
}
