use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use boussinesq_core::analysis::{
    consistency_study, convergence_study, operator_report, oracle_check, stability_probe, theoretical_eta,
    ProbeSettings,
};
use boussinesq_core::io::{format_sig, write_snapshot_digits, Metadata, Report, ReportKind};
use boussinesq_core::lyapunov_solver::solvability_check;
use boussinesq_core::operators::contraction_factor;
use boussinesq_core::stepper::{initialize_with, pair_norm};
use boussinesq_core::{build_grid, build_matrices, coefficients, lyapunov_deviation, run as simulate, Error, Result};

use crate::{load, Common, Outcome};

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

/// Wraps a study result: numerical failures become a report with an error
/// record, anything else propagates as a usage/validation error.
fn finish<T: serde::Serialize>(kind: ReportKind, result: Result<T>, metadata: Metadata) -> Result<Outcome> {
    match result {
        Ok(payload) => Ok(Outcome::ok(Report::new(kind, &payload, metadata)?)),
        Err(e) if e.is_numerical() => Ok(Outcome::numerical(kind, &e, metadata)),
        Err(e) => Err(e),
    }
}

pub fn run(config: &Path, out: Option<&Path>) -> Result<bool> {
    let loaded = load(Some(config), None)?;
    let cfg = &loaded.config;
    let grid = cfg.grid_spec()?;
    let mats = build_matrices(&grid, cfg.scheme.right_transpose);
    let opts = cfg.solver_options();
    let profile = cfg.profile();
    let start = cfg.start_method();
    let digits = cfg.output.precision;
    let every = cfg.run.snapshot_every;

    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.directory.clone().into());
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let norms_path = dir.join("norms.csv");
    let mut norms = BufWriter::new(File::create(&norms_path).map_err(io_err(&norms_path))?);
    writeln!(norms, "n,t,normU,normV").map_err(io_err(&norms_path))?;

    let mut snapshots: Vec<String> = Vec::new();
    let mut io_failure: Option<Error> = None;
    let mut record = |n: usize, t: f64, u: &boussinesq_core::Field, v: &boussinesq_core::Field| -> Result<()> {
        use boussinesq_core::operators::inf_norm;
        writeln!(
            norms,
            "{n},{},{},{}",
            format_sig(t, 17),
            format_sig(inf_norm(u), 17),
            format_sig(inf_norm(v), 17)
        )
        .map_err(io_err(&norms_path))?;
        if every > 0 && n.is_multiple_of(every) {
            for (name, field) in [("u", u), ("v", v)] {
                let file = format!("{name}_{n:06}.csv");
                write_snapshot_digits(field, t, &grid, &dir.join(&file), digits)?;
                snapshots.push(file);
            }
        }
        Ok(())
    };

    let metadata = Metadata::new(Some(loaded.echo.clone()), None);
    let result = initialize_with(&grid, &profile, &mats, start).and_then(|init| {
        record(0, grid.time(0), &init.u_prev, &init.v_prev)?;
        record(1, init.t, &init.u_curr, &init.v_curr)?;
        simulate(&grid, &profile, &mats, &opts, cfg.run.n_steps, start, |obs| {
            if io_failure.is_none() {
                if let Err(e) = record(obs.n, obs.t, &obs.state.u_curr, &obs.state.v_curr) {
                    io_failure = Some(e);
                }
            }
        })
    });
    norms.flush().map_err(io_err(&norms_path))?;
    if let Some(e) = io_failure {
        return Err(e);
    }

    let report_path = dir.join("report.json");
    let ok = match result {
        Ok(state) => {
            let payload = json!({
                "grid": grid,
                "coefficients": mats.coeffs,
                "lyapunov_deviation": lyapunov_deviation(&grid),
                "contraction_factor": contraction_factor(&mats.w, &mats.a, mats.right_transpose),
                "steps": cfg.run.n_steps,
                "final": {
                    "n": state.n,
                    "t": state.t,
                    "pair_norm": pair_norm(&state.u_curr, &state.v_curr),
                },
                "norms": "norms.csv",
                "snapshots": snapshots,
            });
            Report::new(ReportKind::Run, &payload, metadata)?.write(&report_path)?;
            true
        }
        Err(e) if e.is_numerical() => {
            eprintln!("error: {e}");
            Report::failure(ReportKind::Run, &e, metadata).write(&report_path)?;
            false
        }
        Err(e) => return Err(e),
    };
    Ok(ok)
}

pub fn converge(common: &Common, levels: usize, steps: usize) -> Result<Outcome> {
    let loaded = load(common.config.as_deref(), common.cells)?;
    let cfg = &loaded.config;
    let grid = cfg.grid_spec()?;
    let result = convergence_study(&cfg.profile(), &grid, levels, steps, &cfg.solver_options());
    finish(ReportKind::Convergence, result, Metadata::new(Some(loaded.echo), None))
}

pub fn consistency(common: &Common, levels: usize) -> Result<Outcome> {
    let loaded = load(common.config.as_deref(), common.cells)?;
    let cfg = &loaded.config;
    let result = consistency_study(&cfg.profile(), &cfg.grid_spec()?, levels);
    finish(ReportKind::Consistency, result, Metadata::new(Some(loaded.echo), None))
}

pub fn stability(common: &Common, epsilon: f64, steps: usize, trials: usize, seed: u64) -> Result<Outcome> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("--epsilon must be > 0, got {epsilon}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("--steps must be >= 1".into()));
    }
    let loaded = load(common.config.as_deref(), common.cells)?;
    let cfg = &loaded.config;
    let grid = cfg.grid_spec()?;
    let mats = build_matrices(&grid, cfg.scheme.right_transpose);
    let settings = ProbeSettings {
        epsilon,
        n_steps: steps,
        trials,
        seed,
        ..Default::default()
    };
    let result = stability_probe(&grid, &mats, &cfg.solver_options(), &settings, &cfg.profile());
    finish(
        ReportKind::Stability,
        result,
        Metadata::new(Some(loaded.echo), Some(seed)),
    )
}

pub fn operators(common: &Common, samples: usize, seed: u64) -> Result<Outcome> {
    let loaded = load(common.config.as_deref(), common.cells)?;
    let cfg = &loaded.config;
    let grid = cfg.grid_spec()?;
    let mats = build_matrices(&grid, cfg.scheme.right_transpose);
    let report = operator_report(&grid, &mats, samples, seed);
    finish(
        ReportKind::Operators,
        Ok(report),
        Metadata::new(Some(loaded.echo), Some(seed)),
    )
}

pub fn solvability(common: &Common) -> Result<Outcome> {
    let loaded = load(common.config.as_deref(), common.cells)?;
    let grid = loaded.config.grid_spec()?;
    let result = [false, true]
        .into_iter()
        .map(|rt| {
            solvability_check(&grid, rt).map(|s| {
                json!({
                    "right_transpose": rt,
                    "invertible": s.invertible,
                    "min_pivot": s.min_pivot,
                })
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(|cases| json!({ "cells": grid.cells, "alpha": grid.alpha, "l": grid.l, "cases": cases }));
    finish(ReportKind::Solvability, result, Metadata::new(Some(loaded.echo), None))
}

pub fn oracle(common: &Common, alphas: &[f64], samples: usize, seed: u64) -> Result<Outcome> {
    let loaded = load(common.config.as_deref(), None)?;
    let cfg = &loaded.config;
    let max_cells = common.cells.unwrap_or(8);
    let mut grids = Vec::new();
    for cells in 2..=max_cells {
        for &alpha in alphas {
            grids.push(build_grid(
                cfg.domain.l0,
                cfg.domain.l1,
                cells,
                alpha,
                cfg.coupling.s,
                cfg.coupling.eps,
                cfg.run.t0,
            )?);
        }
    }
    let report = oracle_check(&grids, samples, seed, &cfg.solver_options())?;
    let metadata = Metadata::new(Some(loaded.echo), Some(seed));
    let refused: Vec<String> = report
        .cases
        .iter()
        .filter_map(|c| {
            c.fixed_point_failure.as_ref().map(|m| {
                format!(
                    "J={} alpha={} right_transpose={}: {m}",
                    c.cells, c.alpha, c.right_transpose
                )
            })
        })
        .collect();
    let mut out = Report::new(ReportKind::Oracle, &report, metadata)?;
    if refused.is_empty() {
        Ok(Outcome::ok(out))
    } else {
        out.error = Some(boussinesq_core::io::ErrorRecord {
            kind: "contraction_violation".into(),
            message: refused.join("; "),
        });
        Ok(Outcome {
            report: out,
            failed: true,
        })
    }
}

pub fn eta(common: &Common, epsilon: f64, l: Option<f64>, phi_norm: f64) -> Result<Outcome> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("--epsilon must be > 0, got {epsilon}")));
    }
    if phi_norm < 0.0 || l.is_some_and(|l| l < 0.0) {
        return Err(Error::InvalidArgument("--l and --phi-norm must be >= 0".into()));
    }
    let loaded = load(common.config.as_deref(), common.cells)?;
    let grid = loaded.config.grid_spec()?;
    let l = l.unwrap_or(grid.l);
    let b = theoretical_eta(epsilon, l, phi_norm, &coefficients(&grid), grid.h);
    for (name, root) in [
        ("eta1", b.eta1),
        ("eta1_prime", b.eta1_prime),
        ("eps1", b.eps1),
        ("eps1_prime", b.eps1_prime),
    ] {
        let note = if root.admissible {
            String::new()
        } else {
            "  (empty interval)".into()
        };
        println!("{name} = {}{note}", format_sig(root.value, 17));
    }
    println!("eta0 = {}", format_sig(b.eta0, 17));
    let payload = json!({ "l": l, "phi_norm": phi_norm, "h": grid.h, "bounds": b });
    finish(ReportKind::Eta, Ok(payload), Metadata::new(Some(loaded.echo), None))
}
