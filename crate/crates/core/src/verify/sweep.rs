//! Coupling sweep for the first-order energy expansion `E_0 = c1 kappa + o(kappa)`.

use serde::Serialize;

use super::state::{check_arai_identities, check_pull_through, vacuum_normalized};
use super::{check_number_bound, check_overlap, CheckOutcome, CheckStatus, Worst, INEQUALITY_TOL};
use crate::hamiltonian::HamiltonianSet;
use crate::spectral::{ground_state, rayleigh_quotient, EigenOptions};
use crate::theory::{
    lemma31_constants, paper_upper_bound, rayleigh_upper_bound, EpsilonPolicy, TheoryConstants,
};
use crate::Result;

/// Column order of the sweep CSV; matches [`SweepRow::csv_values`] and the
/// serialized field names of [`SweepRow`].
pub const CSV_COLUMNS: [&str; 13] = [
    "kappa",
    "E0",
    "residual",
    "c1_kappa",
    "e_abs",
    "e_over_kappa",
    "rayleigh_bound",
    "paper_bound",
    "n_expect",
    "c_eps_kappa",
    "overlap",
    "pullthrough_resid",
    "top_grade_weight",
];

/// Number of smallest couplings on which monotone decay is asserted.
pub const TAIL: usize = 5;
/// Allowed factor between the fitted `kappa^2` coefficient and `a`.
pub const FIT_FACTOR: f64 = 3.0;
/// Required drop of `e/kappa` from the first to the last row.
pub const DECAY_FACTOR: f64 = 10.0;
/// Agreement of the closed-form Rayleigh bound with the direct quotient.
pub const RAYLEIGH_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub eig: EigenOptions,
    pub lin_tol: f64,
    pub epsilon: EpsilonPolicy,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            eig: EigenOptions::default(),
            lin_tol: 1e-12,
            epsilon: EpsilonPolicy::Optimized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub kappa: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub residual: f64,
    pub c1_kappa: f64,
    /// `e = |E_0 - c1 kappa|`.
    pub e_abs: f64,
    /// `e / kappa`, zero at `kappa = 0`.
    pub e_over_kappa: f64,
    pub rayleigh_bound: f64,
    pub paper_bound: f64,
    pub n_expect: f64,
    pub c_eps_kappa: f64,
    pub epsilon: f64,
    pub overlap: f64,
    pub pullthrough_resid: f64,
    pub top_grade_weight: f64,
    /// `||Omega / (Omega_0, Omega)||`.
    pub psi_tilde_norm: f64,
}

impl SweepRow {
    pub fn csv_values(&self) -> [f64; 13] {
        [
            self.kappa,
            self.e0,
            self.residual,
            self.c1_kappa,
            self.e_abs,
            self.e_over_kappa,
            self.rayleigh_bound,
            self.paper_bound,
            self.n_expect,
            self.c_eps_kappa,
            self.overlap,
            self.pullthrough_resid,
            self.top_grade_weight,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub constants: TheoryConstants,
    /// Sorted by decreasing coupling.
    pub rows: Vec<SweepRow>,
    /// Least-squares `C` in `e = C kappa^2` over the rows with `kappa > 0`.
    pub c_fit: f64,
    pub checks: Vec<CheckOutcome>,
    /// Couplings whose row could not be computed, with the reason.
    pub errors: Vec<String>,
}

impl SweepReport {
    pub fn degraded(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn all_passed(&self) -> bool {
        !self.degraded() && !self.checks.iter().any(|c| c.status.is_failure())
    }
}

/// Solves every coupling in `kappas` (sorted descending first) and runs the
/// per-row and aggregate checks.
pub fn sweep_kappa(
    set: &HamiltonianSet<'_>,
    kappas: &[f64],
    settings: &SweepSettings,
) -> Result<SweepReport> {
    let constants = TheoryConstants::compute(set)?;
    let lemma = lemma31_constants(set)?;
    let mut kappas = kappas.to_vec();
    kappas.sort_by(|a, b| b.total_cmp(a));
    kappas.dedup();

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    for &kappa in &kappas {
        match sweep_row(set, kappa, settings, &constants, &lemma) {
            Ok((row, row_checks)) => {
                rows.push(row);
                checks.extend(row_checks);
            }
            Err(e) => errors.push(format!("kappa = {kappa}: {e}")),
        }
    }
    let c_fit = fit_quadratic(&rows);
    checks.extend(aggregate_checks(&rows, c_fit, constants.a));
    Ok(SweepReport {
        constants,
        rows,
        c_fit,
        checks,
        errors,
    })
}

fn sweep_row(
    set: &HamiltonianSet<'_>,
    kappa: f64,
    settings: &SweepSettings,
    constants: &TheoryConstants,
    lemma: &crate::theory::Lemma31,
) -> Result<(SweepRow, Vec<CheckOutcome>)> {
    let h = set.h_kappa(kappa)?;
    let state = ground_state(&h, set.basis, &settings.eig)?;
    let family = settings
        .epsilon
        .family(kappa, state.energy, set.grid, set.quadrature)?;
    let tag = |name: &str| format!("{name}@kappa={kappa}");
    let retag = |mut c: CheckOutcome| {
        c.name = tag(&c.name);
        c
    };

    let e0 = state.energy;
    let c1_kappa = constants.c1 * kappa;
    let e_abs = (e0 - c1_kappa).abs();
    let rayleigh = rayleigh_upper_bound(kappa, constants);
    let direct = rayleigh_quotient(&h, &lemma.trial_vector(kappa))?;
    let n_expect = state
        .ground_vector
        .dot(&set.basis.apply_number(&state.ground_vector))
        .re;
    let pull = check_pull_through(set, kappa, &state, settings.lin_tol)?;
    let psi_tilde_norm = vacuum_normalized(&state)?.norm();

    let mut checks = vec![CheckOutcome::residual(
        tag("eigen_residual"),
        state.residual / e0.abs().max(1.0),
        settings.eig.tol,
        format!("{} iterations", state.iterations),
    )];
    let mut bound = Worst::new();
    bound.record_with_floor(e0, rayleigh, 1.0);
    checks.push(CheckOutcome::inequality(
        tag("rayleigh_bound"),
        bound.0,
        INEQUALITY_TOL,
        format!("E_0 = {e0:.12e}, bound = {rayleigh:.12e}"),
    ));
    checks.push(CheckOutcome::residual(
        tag("rayleigh_quotient_match"),
        (rayleigh - direct).abs() / direct.abs().max(f64::MIN_POSITIVE),
        RAYLEIGH_MATCH_TOL,
        format!("direct quotient {direct:.12e}"),
    ));
    let mut sandwich = Worst::new();
    sandwich.record_with_floor(0.0, e0, 1.0);
    sandwich.record_with_floor(e0, c1_kappa, 1.0);
    checks.push(CheckOutcome::inequality(
        tag("energy_sandwich"),
        sandwich.0,
        INEQUALITY_TOL,
        format!("0 <= E_0 = {e0:.12e} <= c1 kappa = {c1_kappa:.12e}"),
    ));
    checks.extend(
        check_number_bound(set, &state, &family)
            .into_iter()
            .map(retag),
    );
    checks.extend(
        check_overlap(set.basis, &state, Some(&family))
            .into_iter()
            .map(retag),
    );
    checks.extend(
        check_arai_identities(set, kappa, &state)?
            .into_iter()
            .map(retag),
    );
    checks.push(retag(pull.outcome.clone()));

    let row = SweepRow {
        kappa,
        e0,
        residual: state.residual,
        c1_kappa,
        e_abs,
        e_over_kappa: if kappa > 0.0 { e_abs / kappa } else { 0.0 },
        rayleigh_bound: rayleigh,
        paper_bound: paper_upper_bound(kappa, constants),
        n_expect,
        c_eps_kappa: family.c_number,
        epsilon: family.epsilon,
        overlap: state.ground_vector[0].norm(),
        pullthrough_resid: pull.residual,
        top_grade_weight: state.top_grade_weight,
        psi_tilde_norm,
    };
    Ok((row, checks))
}

fn fit_quadratic(rows: &[SweepRow]) -> f64 {
    let (num, den) = rows
        .iter()
        .filter(|r| r.kappa > 0.0)
        .fold((0.0, 0.0), |(n, d), r| {
            (n + r.e_abs * r.kappa.powi(2), d + r.kappa.powi(4))
        });
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

/// Strict decrease of `values` along the list: `measured` is the worst
/// `(next - prev) / prev`, required to be negative.
fn strictly_decreasing(name: &str, values: &[f64], detail: String) -> CheckOutcome {
    let worst = values
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut c = CheckOutcome::inequality(name, worst, 0.0, detail);
    if worst >= 0.0 {
        c.status = CheckStatus::Fail;
    }
    c
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn aggregate_checks(rows: &[SweepRow], c_fit: f64, a: f64) -> Vec<CheckOutcome> {
    let positive: Vec<&SweepRow> = rows.iter().filter(|r| r.kappa > 0.0).collect();
    let mut out = Vec::new();
    if positive.len() < TAIL {
        let why = format!(
            "needs at least {TAIL} positive couplings, have {}",
            positive.len()
        );
        for name in [
            "e_over_kappa_tail_decreasing",
            "e_over_kappa_decay",
            "c_fit_vs_a",
            "psi_tilde_tail",
        ] {
            out.push(CheckOutcome::skipped(name, why.clone()));
        }
        return out;
    }
    let tail = &positive[positive.len() - TAIL..];
    let ratios: Vec<f64> = tail.iter().map(|r| r.e_over_kappa).collect();
    out.push(strictly_decreasing(
        "e_over_kappa_tail_decreasing",
        &ratios,
        format!("last {TAIL} values {}", sci(&ratios)),
    ));

    let (first, last) = (
        positive[0].e_over_kappa,
        positive[positive.len() - 1].e_over_kappa,
    );
    out.push(CheckOutcome::residual(
        "e_over_kappa_decay",
        last / first.max(f64::MIN_POSITIVE),
        1.0 / DECAY_FACTOR,
        format!("first {first:.6e}, last {last:.6e}"),
    ));

    let factor = if c_fit > 0.0 && a > 0.0 {
        (c_fit / a).max(a / c_fit)
    } else {
        f64::INFINITY
    };
    out.push(CheckOutcome::residual(
        "c_fit_vs_a",
        factor,
        FIT_FACTOR,
        format!("C_fit = {c_fit:.6e}, a = {a:.6e}"),
    ));

    let excess: Vec<f64> = tail.iter().map(|r| r.psi_tilde_norm - 1.0).collect();
    let mut psi = strictly_decreasing(
        "psi_tilde_tail",
        &excess,
        format!("||Psi|| - 1 on the tail {}", sci(&excess)),
    );
    if excess.iter().any(|&x| x < 0.0) {
        psi.status = CheckStatus::Fail;
    }
    out.push(psi);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CutoffSpec, GridSpec, QuadratureSpec};
    use crate::model::Model;

    fn model(n_max: usize) -> Model {
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
    fn zero_coupling_row() {
        let m = model(8);
        let report = sweep_kappa(&m.hamiltonians(), &[0.0], &SweepSettings::default()).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert!(row.e0.abs() < 1e-12 && row.e_abs < 1e-12 && row.e_over_kappa == 0.0);
        assert!(report.c_fit.is_nan());
        assert!(
            report.checks.iter().all(|c| !c.status.is_failure()),
            "{:#?}",
            report.checks
        );
    }

    #[test]
    fn rows_are_sorted_descending() {
        let m = model(8);
        let report = sweep_kappa(
            &m.hamiltonians(),
            &[0.01, 0.04, 0.02],
            &SweepSettings::default(),
        )
        .unwrap();
        let k: Vec<f64> = report.rows.iter().map(|r| r.kappa).collect();
        assert_eq!(k, vec![0.04, 0.02, 0.01]);
        assert!(report
            .rows
            .iter()
            .all(|r| r.e0 >= 0.0 && r.e0 <= r.c1_kappa));
    }

    #[test]
    fn strict_decrease_rejects_plateau() {
        assert!(strictly_decreasing("x", &[3.0, 2.0, 1.0], String::new()).passed());
        assert!(!strictly_decreasing("x", &[3.0, 3.0, 1.0], String::new()).passed());
    }

    #[test]
    fn quadratic_fit_recovers_coefficient() {
        let rows: Vec<SweepRow> = [0.1, 0.05, 0.0]
            .iter()
            .map(|&kappa| SweepRow {
                kappa,
                e0: 0.0,
                residual: 0.0,
                c1_kappa: 0.0,
                e_abs: 7.0 * kappa * kappa,
                e_over_kappa: 0.0,
                rayleigh_bound: 0.0,
                paper_bound: 0.0,
                n_expect: 0.0,
                c_eps_kappa: 0.0,
                epsilon: 0.0,
                overlap: 1.0,
                pullthrough_resid: 0.0,
                top_grade_weight: 0.0,
                psi_tilde_norm: 1.0,
            })
            .collect();
        assert!((fit_quadratic(&rows) - 7.0).abs() < 1e-12);
    }
}
