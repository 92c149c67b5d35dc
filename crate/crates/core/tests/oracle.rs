//! Matrix-free operators against the dense construction.

mod common;

use common::{assembled, dense_ground_energy, max_abs_diff, DenseOracle};
use phi4lab::model::Model;
use phi4lab::spectral::{ground_state, EigenOptions};

fn compare(model: &Model, kappas: &[f64]) {
    let set = model.hamiltonians();
    let dense = DenseOracle::new(&model.basis);
    let h0 = dense.free(&model.grid);
    let d = max_abs_diff(&assembled(&set.free), &h0);
    assert!(d <= 1e-14, "H_0: {d:e}");
    let d = max_abs_diff(&assembled(&set.number()), &dense.number());
    assert!(d <= 1e-14, "N_b: {d:e}");
    for x in [[0.0], [0.37], [-1.0]] {
        let d = max_abs_diff(&assembled(&set.field(&x)), &dense.field(&model.grid, &x));
        assert!(d <= 1e-14, "phi({x:?}): {d:e}");
    }
    let hi = dense.interaction(&model.grid, &model.quadrature);
    let d = max_abs_diff(&assembled(&set.interaction), &hi);
    assert!(d <= 1e-14, "H_I: {d:e}");
    for &kappa in kappas {
        let h = set.h_kappa(kappa).unwrap();
        let dense_h = &h0 + &hi * phi4lab::C64::new(kappa, 0.0);
        let d = max_abs_diff(&assembled(&h), &dense_h);
        assert!(d <= 1e-14, "H(kappa = {kappa}): {d:e}");
        let e = ground_state(&h, &model.basis, &EigenOptions::default())
            .unwrap()
            .energy;
        let e_dense = dense_ground_energy(&dense_h);
        assert!(
            (e - e_dense).abs() <= 1e-10,
            "kappa = {kappa}: {e} vs {e_dense}"
        );
    }
}

#[test]
fn single_mode_to_twelve_bosons() {
    compare(&common::single_mode_model(12), &[0.0, 0.05, 0.2, 1.0]);
}

#[test]
fn two_asymmetric_modes_to_four_bosons() {
    compare(&common::two_mode_model(4), &[0.0, 0.05, 0.2, 1.0]);
}

#[test]
fn reference_model_energies() {
    let m = common::reference_model(6);
    let set = m.hamiltonians();
    let dense = DenseOracle::new(&m.basis);
    let h = dense.free(&m.grid)
        + dense.interaction(&m.grid, &m.quadrature) * phi4lab::C64::new(0.1, 0.0);
    let e = ground_state(
        &set.h_kappa(0.1).unwrap(),
        &m.basis,
        &EigenOptions::default(),
    )
    .unwrap()
    .energy;
    assert!((e - dense_ground_energy(&h)).abs() <= 1e-10);
}
