//! Command-line front end: `phi4lab <subcommand> --config <path> [--out <dir>] [--seed <n>]`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ModelParams;
use crate::model::Model;
use crate::report::{
    dump_vector, render_stored, write_outputs, ModelInfo, RunReport, StateSummary, REPORT_FILE,
};
use crate::spectral::ground_state;
use crate::theory::TheoryConstants;
use crate::verify::{
    ground_state_checks, run_identity_suite, run_inequality_suite, sweep_kappa, CheckOutcome,
    InequalityContext, DEFAULT_SAMPLES,
};
use crate::Result;

#[derive(Debug, Parser)]
#[command(
    name = "phi4lab",
    version,
    about = "Truncated Fock-space laboratory for the cutoff phi^4 model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Basis dimension, cutoff norms and closed-form constants, without solving.
    Info(CommonArgs),
    /// Ground state at `coupling.kappa` with every check.
    Solve(CommonArgs),
    /// Ground states over `coupling.kappa_list`; writes the CSV.
    Sweep(CommonArgs),
    /// Identity and inequality suites on random vectors only.
    Verify(CommonArgs),
    /// Re-renders a stored report from the output directory.
    Report(CommonArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: `output.dir` from the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `model.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info(_) => "info",
            Command::Solve(_) => "solve",
            Command::Sweep(_) => "sweep",
            Command::Verify(_) => "verify",
            Command::Report(_) => "report",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Info(a)
            | Command::Solve(a)
            | Command::Sweep(a)
            | Command::Verify(a)
            | Command::Report(a) => a,
        }
    }
}

/// Exit status: 0 when every check passes, 1 when one fails, 2 on errors.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli.command) {
        Ok(text) => {
            print!("{}", text.output);
            if text.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Printed output and overall verdict of one invocation.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub output: String,
    pub passed: bool,
}

pub fn run(command: &Command) -> Result<RunOutput> {
    let args = command.args();
    let mut params = ModelParams::load(&args.config)?;
    if let Some(seed) = args.seed {
        params.model.seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| params.output.dir.clone());

    if let Command::Report(_) = command {
        let text = fs::read_to_string(out_dir.join(REPORT_FILE))?;
        let output = render_stored(&text)?;
        let passed = output.ends_with("overall: pass\n");
        return Ok(RunOutput { output, passed });
    }

    let model = Model::from_params(&params)?;
    let set = model.hamiltonians();
    let seed = params.model.seed;
    let info = ModelInfo::new(&model.basis, &model.grid, &model.quadrature);
    let mut report = RunReport::new(command.name(), seed, params.echo(), info);
    report.constants = TheoryConstants::compute(&set).ok();
    let mut text = String::new();

    match command {
        Command::Info(_) => {
            text.push_str(&serde_json::to_string_pretty(&report.info).expect("info serializes"));
            text.push('\n');
        }
        Command::Solve(_) => {
            let kappa = params.coupling.kappa;
            let state = ground_state(&set.h_kappa(kappa)?, &model.basis, &params.eigen_options())?;
            let family =
                params
                    .epsilon
                    .family(kappa, state.energy, &model.grid, &model.quadrature)?;
            report.checks = ground_state_checks(
                &set,
                kappa,
                &state,
                params.solver.eig_tol,
                params.solver.lin_tol,
            )?;
            let ctx = InequalityContext {
                kappa,
                family,
                state: Some(&state),
                samples: DEFAULT_SAMPLES,
                seed,
            };
            report.checks.extend(run_inequality_suite(&set, &ctx));
            let summary = StateSummary::new(kappa, &state);
            text.push_str(&format!(
                "kappa = {kappa}: E0 = {:.16e}, residual {:.3e}, overlap {:.12}, gap {:.6e}\n",
                summary.energy, summary.residual, summary.overlap, summary.gap_estimate
            ));
            if params.output.dump_vectors {
                dump_vector(&out_dir, 0, &model.basis, &state.ground_vector)?;
            }
            report.state = Some(summary);
        }
        Command::Sweep(_) => {
            let settings = params.sweep_settings();
            let sweep = sweep_kappa(&set, &params.coupling.kappa_list, &settings)?;
            if params.output.dump_vectors {
                for (i, row) in sweep.rows.iter().enumerate() {
                    let state =
                        ground_state(&set.h_kappa(row.kappa)?, &model.basis, &settings.eig)?;
                    dump_vector(&out_dir, i, &model.basis, &state.ground_vector)?;
                }
            }
            text.push_str(&crate::report::csv_string(&sweep.rows));
            text.push_str(&format!(
                "C_fit = {:.6e}, a = {:.6e}\n",
                sweep.c_fit, sweep.constants.a
            ));
            for e in &sweep.errors {
                text.push_str(&format!("degraded: {e}\n"));
            }
            report.sweep = Some(sweep);
        }
        Command::Verify(_) => {
            let kappa = params.coupling.kappa;
            let family = params
                .epsilon
                .family(kappa, 0.0, &model.grid, &model.quadrature)?;
            report.checks = run_identity_suite(&set, DEFAULT_SAMPLES, seed);
            let ctx = InequalityContext {
                kappa,
                family,
                state: None,
                samples: DEFAULT_SAMPLES,
                seed,
            };
            report.checks.extend(run_inequality_suite(&set, &ctx));
        }
        Command::Report(_) => unreachable!("handled above"),
    }

    report.finish();
    for c in report.all_checks() {
        text.push_str(&format!("{c}\n"));
    }
    let failed: Vec<&CheckOutcome> = report
        .all_checks()
        .filter(|c| c.status.is_failure())
        .collect();
    text.push_str(&format!(
        "overall: {} ({} checks, {} failed)\n",
        if report.passed { "pass" } else { "FAIL" },
        report.all_checks().count(),
        failed.len()
    ));
    write_outputs(&out_dir, &report)?;
    Ok(RunOutput {
        output: text,
        passed: report.passed,
    })
}
