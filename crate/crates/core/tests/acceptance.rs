//! Acceptance criteria 1-8 on the reference model. Prints one line per
//! criterion and exits nonzero if any fails.

mod common;

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{assembled, dense_ground_energy, max_abs_diff, DenseOracle};
use phi4lab::model::Model;
use phi4lab::spectral::{ground_state, EigenOptions};
use phi4lab::theory::{epsilon_family, optimize_epsilon};
use phi4lab::verify::{
    check_hbound, check_pull_through, run_identity_suite, run_inequality_suite, sweep_kappa,
    CheckOutcome, CheckStatus, InequalityContext, SweepReport, DEFAULT_SAMPLES,
};
use phi4lab::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        v.pass = false;
    }
    v.detail = format!(
        "{}; {:.2} s (limit {} s)",
        v.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    v
}

fn failures(checks: &[CheckOutcome]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.to_string())
        .collect()
}

fn oracle_equivalence() -> Verdict {
    let mut worst_entry: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    for model in [common::single_mode_model(12), common::two_mode_model(4)] {
        let set = model.hamiltonians();
        let dense = DenseOracle::new(&model.basis);
        let h0 = dense.free(&model.grid);
        let hi = dense.interaction(&model.grid, &model.quadrature);
        worst_entry = worst_entry.max(max_abs_diff(&assembled(&set.free), &h0));
        worst_entry = worst_entry.max(max_abs_diff(&assembled(&set.number()), &dense.number()));
        for x in [[0.0], [0.37], [-1.0]] {
            worst_entry = worst_entry.max(max_abs_diff(
                &assembled(&set.field(&x)),
                &dense.field(&model.grid, &x),
            ));
        }
        worst_entry = worst_entry.max(max_abs_diff(&assembled(&set.interaction), &hi));
        for kappa in [0.0, 0.05, 0.2, 1.0] {
            let h = set.h_kappa(kappa).unwrap();
            let dense_h = &h0 + &hi * C64::new(kappa, 0.0);
            worst_entry = worst_entry.max(max_abs_diff(&assembled(&h), &dense_h));
            let e = ground_state(&h, &model.basis, &EigenOptions::default())
                .unwrap()
                .energy;
            worst_energy = worst_energy.max((e - dense_ground_energy(&dense_h)).abs());
        }
    }
    Verdict {
        pass: worst_entry <= 1e-14 && worst_energy <= 1e-10,
        detail: format!("max entry diff {worst_entry:.2e} (<= 1e-14), max energy diff {worst_energy:.2e} (<= 1e-10)"),
    }
}

fn identity_suite(model: &Model, seed: u64) -> Verdict {
    let checks = run_identity_suite(&model.hamiltonians(), DEFAULT_SAMPLES, seed);
    let worst = checks.iter().map(|c| c.measured).fold(0.0, f64::max);
    let bad = failures(&checks);
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "{} identities x {DEFAULT_SAMPLES} vectors, worst relative residual {worst:.2e}{}",
            checks.len(),
            list(&bad)
        ),
    }
}

fn inequality_suite(model: &Model, seed: u64) -> Verdict {
    let set = model.hamiltonians();
    let mut checks = Vec::new();
    for kappa in [0.1, 0.05] {
        let state = ground_state(
            &set.h_kappa(kappa).unwrap(),
            &model.basis,
            &EigenOptions::default(),
        )
        .unwrap();
        let opt = optimize_epsilon(kappa, state.energy, &model.grid, &model.quadrature).unwrap();
        let ctx = InequalityContext {
            kappa,
            family: opt.family,
            state: Some(&state),
            samples: DEFAULT_SAMPLES,
            seed,
        };
        checks.extend(run_inequality_suite(&set, &ctx));
        let half = epsilon_family(
            opt.family.epsilon / 2.0,
            kappa,
            state.energy,
            &model.grid,
            &model.quadrature,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        checks.extend(check_hbound(&set, kappa, &half, DEFAULT_SAMPLES, &mut rng));
    }
    let ran: Vec<&CheckOutcome> = checks
        .iter()
        .filter(|c| c.status != CheckStatus::Skipped)
        .collect();
    let min_slack = ran.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let mut bad = failures(
        &checks
            .iter()
            .filter(|c| c.status != CheckStatus::Skipped)
            .cloned()
            .collect::<Vec<_>>(),
    );
    bad.extend(
        ran.iter()
            .filter(|c| c.slack < 0.0)
            .map(|c| format!("negative slack: {c}")),
    );
    let skipped: Vec<String> = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Skipped)
        .map(|c| c.to_string())
        .collect();
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "{} inequality checks at kappa 0.1 and 0.05, min slack {min_slack:.2e}, {} skipped{}{}",
            ran.len(),
            skipped.len(),
            list(&bad),
            list(&skipped)
        ),
    }
}

fn named<'a>(report: &'a SweepReport, prefix: &str) -> Vec<&'a CheckOutcome> {
    report
        .checks
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .collect()
}

fn rayleigh(report: &SweepReport) -> Verdict {
    let bounds = named(report, "rayleigh_bound@");
    let matches = named(report, "rayleigh_quotient_match@");
    let min_slack = bounds.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let worst_match = matches.iter().map(|c| c.measured).fold(0.0, f64::max);
    Verdict {
        pass: bounds.len() == report.rows.len()
            && matches.len() == report.rows.len()
            && min_slack >= -1e-10
            && worst_match <= 1e-12,
        detail: format!("{} couplings, min slack {min_slack:.2e} (>= -1e-10), worst match {worst_match:.2e} (<= 1e-12)", bounds.len()),
    }
}

fn first_order(report: &SweepReport) -> Verdict {
    let checks: Vec<CheckOutcome> = [
        "e_over_kappa_tail_decreasing",
        "e_over_kappa_decay",
        "c_fit_vs_a",
    ]
    .iter()
    .flat_map(|n| named(report, n).into_iter().cloned())
    .collect();
    let first = report.rows.first().map_or(f64::NAN, |r| r.e_over_kappa);
    let last = report.rows.last().map_or(f64::NAN, |r| r.e_over_kappa);
    Verdict {
        pass: checks.len() == 3
            && checks.iter().all(|c| c.status == CheckStatus::Pass)
            && report.rows.len() == 7,
        detail: format!(
            "{} rows, e/kappa {first:.3e} -> {last:.3e} (ratio {:.3e} < 0.1), C_fit/a = {:.3}{}",
            report.rows.len(),
            last / first,
            report.c_fit / report.constants.a,
            list(&failures(&checks))
        ),
    }
}

fn pull_through(base: &Model) -> Verdict {
    let kappa = 0.05;
    let mut residuals = Vec::new();
    for n_max in [8, 10, 12] {
        let m = base.with_n_max(n_max).unwrap();
        let set = m.hamiltonians();
        let state = ground_state(
            &set.h_kappa(kappa).unwrap(),
            &m.basis,
            &EigenOptions::default(),
        )
        .unwrap();
        residuals.push(
            check_pull_through(&set, kappa, &state, 1e-12)
                .unwrap()
                .residual,
        );
    }
    Verdict {
        pass: residuals[1] <= 1e-6 && residuals[0] > residuals[1] && residuals[1] > residuals[2],
        detail: format!(
            "kappa = 0.05, N_max 8/10/12 residuals {:.2e} / {:.2e} / {:.2e} (N_max 10 <= 1e-6, decreasing)",
            residuals[0], residuals[1], residuals[2]
        ),
    }
}

fn arai(report: &SweepReport, min_omega: f64) -> Verdict {
    let mut bad = Vec::new();
    let (mut worst_e, mut worst_v): (f64, f64) = (0.0, 0.0);
    for row in &report.rows {
        let tag = format!("@kappa={}", row.kappa);
        for (name, tol, worst) in [
            ("arai_energy", 1e-9, &mut worst_e),
            ("arai_vector", 1e-8, &mut worst_v),
        ] {
            let c = report
                .checks
                .iter()
                .find(|c| c.name == format!("{name}{tag}"));
            match c {
                Some(c)
                    if row.e0 < min_omega && c.status == CheckStatus::Pass && c.measured <= tol =>
                {
                    *worst = worst.max(c.measured)
                }
                Some(c) if row.e0 >= min_omega && c.status == CheckStatus::Skipped => {}
                other => bad.push(format!("{name}{tag}: {other:?}")),
            }
        }
    }
    let tail = named(report, "psi_tilde_tail");
    let tail_ok = tail.len() == 1 && tail[0].status == CheckStatus::Pass;
    if !tail_ok {
        bad.extend(tail.iter().map(|c| c.to_string()));
    }
    let norms: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:.3e}", r.psi_tilde_norm - 1.0))
        .collect();
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "worst energy identity {worst_e:.2e} (<= 1e-9), worst vector identity {worst_v:.2e} (<= 1e-8), ||Psi|| - 1 = [{}]{}",
            norms.join(", "),
            list(&bad)
        ),
    }
}

fn determinism() -> Verdict {
    let config = common::config_path("reference.toml");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_phi4lab"))
            .args([
                "sweep",
                "--config",
                config.to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .output()
            .expect("binary runs")
            .status;
        outputs.push((
            status.code(),
            fs::read(dir.path().join("sweep.csv")).unwrap_or_default(),
        ));
    }
    let same = outputs[0].1 == outputs[1].1 && !outputs[0].1.is_empty();
    Verdict {
        pass: same,
        detail: format!(
            "two `sweep` runs, exit codes {:?}/{:?}, CSV {} bytes, identical: {same}",
            outputs[0].0,
            outputs[1].0,
            outputs[0].1.len()
        ),
    }
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("\n      {}", items.join("\n      "))
    }
}

fn main() -> ExitCode {
    let params = common::reference_params();
    let base = Model::from_params(&params).unwrap();
    let seed = params.model.seed;

    let mut sweep = None;
    let mut results = Vec::new();
    results.push((
        "oracle equivalence",
        timed(Duration::from_secs(10), oracle_equivalence),
    ));
    results.push((
        "identity suite",
        timed(Duration::from_secs(30), || identity_suite(&base, seed)),
    ));
    results.push((
        "inequality suite",
        timed(Duration::from_secs(120), || inequality_suite(&base, seed)),
    ));
    let sweep_verdict = timed(Duration::from_secs(300), || {
        let report = sweep_kappa(
            &base.hamiltonians(),
            &params.coupling.kappa_list,
            &params.sweep_settings(),
        )
        .unwrap();
        let v = first_order(&report);
        sweep = Some(report);
        v
    });
    let report = sweep.expect("sweep ran");
    results.push(("rayleigh bound", rayleigh(&report)));
    results.push(("first-order expansion", sweep_verdict));
    results.push(("pull-through", pull_through(&base)));
    results.push(("arai identities", arai(&report, base.grid.min_omega())));
    results.push(("determinism", determinism()));

    let mut all = true;
    for (i, (name, v)) in results.iter().enumerate() {
        all &= v.pass;
        println!(
            "criterion {} {:<22} {}  {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
