//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and runtime budget and prints a single `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p boussinesq-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use boussinesq_core::analysis::{
    consistency_study, operator_report, oracle_check, stability_probe, theoretical_eta, ProbeSettings,
};
use boussinesq_core::io::{read_snapshot, write_snapshot, Metadata, Report, ReportKind};
use boussinesq_core::lyapunov_solver::solvability_check;
use boussinesq_core::operators::{generalized_apply, inf_norm};
use boussinesq_core::stepper::{fhat, nonlinearity};
use boussinesq_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHAS: [f64; 3] = [0.1, 0.25, 0.4];

fn unit_grid(cells: usize, alpha: f64, s: f64) -> GridSpec {
    build_grid(0.0, 1.0, cells, alpha, s, 1.0, 0.0).unwrap()
}

fn verdict(id: u32, name: &str, pass: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let within = elapsed <= budget;
    let ok = pass && within;
    println!(
        "criterion {id:>2} {name}: {} ({detail}; {:.2?} of {:?})",
        if ok { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
    assert!(within, "criterion {id} ({name}) over budget: {elapsed:?} > {budget:?}");
}

/// Pentadiagonal `W` written out from its closed-form entries, with the
/// coefficients recomputed from `α, σ, δ` here rather than taken from the
/// library.
fn w_display(cells: usize, alpha: f64, sigma: f64, delta: f64) -> Matrix {
    let a1 = 0.5 + 2.0 * alpha * sigma;
    let a2 = -alpha * sigma;
    let c2 = alpha * delta;
    let w = 2.0 * a2 * c2;
    let w1 = a1 + 6.0 * w;
    let w1b = w1 + w;
    let w2 = a2 - 4.0 * w;
    let n = cells + 1;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for (d, v) in [(-2i64, w), (-1, w2), (0, w1), (1, w2), (2, w)] {
            let j = i as i64 + d;
            if (0..n as i64).contains(&j) {
                m[(i, j as usize)] = v;
            }
        }
    }
    let last = cells;
    m[(0, 1)] = 2.0 * w2;
    m[(0, 2)] = 2.0 * w;
    m[(1, 1)] = w1b;
    m[(last - 1, last - 1)] = w1b;
    m[(last, last - 1)] = 2.0 * w2;
    m[(last, last - 2)] = 2.0 * w;
    m
}

fn tridiagonal_display(cells: usize, d: f64, o: f64) -> Matrix {
    let n = cells + 1;
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            d
        } else if (i == 0 && j == 1) || (i == cells && j == cells - 1) {
            2.0 * o
        } else if i.abs_diff(j) == 1 {
            o
        } else {
            0.0
        }
    })
}

#[test]
fn c01_matrix_fidelity() {
    let start = Instant::now();
    let mut worst_w = 0.0f64;
    let mut exact = true;
    for cells in [5, 8, 16] {
        for alpha in ALPHAS {
            let g = unit_grid(cells, alpha, 1.0);
            let m = build_matrices(&g, false);
            let (s, d) = (g.sigma, g.delta);
            exact &= m.a == tridiagonal_display(cells, 0.5 + 2.0 * alpha * s, -alpha * s);
            exact &= m.b == tridiagonal_display(cells, 1.0 - 2.0 * (1.0 - 2.0 * alpha) * s, (1.0 - 2.0 * alpha) * s);
            exact &= m.r == tridiagonal_display(cells, -2.0, 1.0);
            let disp = w_display(cells, alpha, s, d);
            for (x, y) in m.w.iter().zip(disp.iter()) {
                let rel = if *y == 0.0 { x.abs() } else { ((x - y) / y).abs() };
                worst_w = worst_w.max(rel);
            }
        }
    }
    verdict(
        1,
        "matrix fidelity",
        exact && worst_w <= 1e-14,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("A/B/R exact: {exact}, worst W relative error {worst_w:.2e} <= 1e-14"),
    );
}

#[test]
fn c02_solver_oracle_equivalence() {
    let start = Instant::now();
    let grids: Vec<GridSpec> = (2..=8)
        .flat_map(|cells| ALPHAS.map(|alpha| unit_grid(cells, alpha, 1.0)))
        .collect();
    let report = oracle_check(&grids, 20, 2024, &SolverOptions::default()).unwrap();
    let failed: Vec<String> = report
        .cases
        .iter()
        .filter(|c| c.fixed_point_failure.is_some())
        .map(|c| format!("J={} α={} rt={}", c.cells, c.alpha, c.right_transpose))
        .collect();
    let agree = failed.is_empty() && report.max_difference <= 1e-9;
    let large_q: Vec<String> = report
        .cases
        .iter()
        .filter(|c| c.contraction_factor >= 0.1)
        .map(|c| {
            format!(
                "J={} α={} rt={} q={:.3}",
                c.cells, c.alpha, c.right_transpose, c.contraction_factor
            )
        })
        .collect();
    verdict(
        2,
        "solver oracle equivalence",
        agree && large_q.is_empty(),
        start.elapsed(),
        Duration::from_secs(30),
        &format!(
            "{} cases, max difference {:.2e} <= 1e-9, fixed-point refused on {:?}, q >= 0.1 on {} cases: {:?}",
            report.cases.len(),
            report.max_difference,
            failed,
            large_q.len(),
            large_q
        ),
    );
}

#[test]
fn c03_solvability() {
    let start = Instant::now();
    let mut min_pivot = f64::INFINITY;
    let mut all_invertible = true;
    for cells in 2..=8 {
        for rt in [false, true] {
            let s = solvability_check(&unit_grid(cells, 0.25, 1.0), rt).unwrap();
            min_pivot = min_pivot.min(s.min_pivot);
            all_invertible &= s.invertible;
        }
    }
    verdict(
        3,
        "solvability",
        all_invertible && min_pivot >= 0.4,
        start.elapsed(),
        Duration::from_secs(10),
        &format!("J in 2..=8, α=1/4, both variants: invertible {all_invertible}, min pivot {min_pivot:.4} >= 0.4"),
    );
}

#[test]
fn c04_operator_lemmas() {
    let start = Instant::now();
    let g = unit_grid(64, 0.25, 0.5);
    let mut pass = true;
    let mut detail = Vec::new();
    for rt in [false, true] {
        let r = operator_report(&g, &build_matrices(&g, rt), 100, 7);
        pass &= r.lwa_within_half_band && r.btilde_b_within_six;
        detail.push(format!(
            "rt={rt}: L_WA in [{:.4}, {:.4}], max L_BB {:.4}",
            r.min_lwa, r.max_lwa, r.max_btilde_b
        ));
    }
    verdict(
        4,
        "operator lemmas",
        pass,
        start.elapsed(),
        Duration::from_secs(30),
        &detail.join("; "),
    );
}

#[test]
fn c05_deviation_rate() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for s in [0.5, 1.0] {
        let q: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&j| lyapunov_deviation(&unit_grid(j, 0.25, s)))
            .collect();
        let expected = 2f64.powf(2.0 * s);
        for w in q.windows(2) {
            let rel = w[0] / w[1] / expected;
            pass &= (0.7..=1.3).contains(&rel);
            detail.push(format!("s={s}: ratio/4^s = {rel:.4}"));
        }
    }
    verdict(
        5,
        "deviation rate",
        pass,
        start.elapsed(),
        Duration::from_secs(5),
        &detail.join(", "),
    );
}

#[test]
fn c06_consistency_order() {
    let start = Instant::now();
    let profile = Profile::cosine(0.0, 1.0, 1.0).with_decay(1.0);
    let study = consistency_study(&profile, &unit_grid(8, 0.25, 1.0), 3).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, orders) in study.quantities.iter().zip(&study.observed_orders) {
        let ratios: Vec<f64> = orders.iter().map(|o| 2f64.powf(o.unwrap_or(f64::NAN))).collect();
        pass &= ratios.iter().all(|r| (3.2..=4.8).contains(r));
        detail.push(format!("{name} ratios {ratios:.3?}"));
    }
    verdict(
        6,
        "consistency order",
        pass,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("J 8→16→32: {}", detail.join(", ")),
    );
}

#[test]
fn c07_constant_preservation() {
    let start = Instant::now();
    let c = 0.7;
    let g = unit_grid(16, 0.25, 1.0);
    let m = build_matrices(&g, true);
    let opts = SolverOptions {
        right_transpose: true,
        ..Default::default()
    };
    let state = run(&g, &Profile::constant(c), &m, &opts, 200, StartMethod::Taylor, |_| {}).unwrap();
    let n = g.side();
    let du = inf_norm(&state.u_curr.map(|x| x - c));
    let dv = inf_norm(&state.v_curr.map(|x| x - c * c));
    verdict(
        7,
        "constant preservation",
        state.n == 201 && du <= 1e-10 && dv <= 1e-10,
        start.elapsed(),
        Duration::from_secs(10),
        &format!("J=16 ({n} nodes), 200 steps: drift U {du:.2e}, V {dv:.2e} <= 1e-10"),
    );
}

#[test]
fn c08_reduced_form_equivalence() {
    let start = Instant::now();
    let g = unit_grid(8, 0.25, 1.0);
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let rt = trial % 2 == 1;
        let m = build_matrices(&g, rt);
        let c = m.coeffs;
        let mut field = || Field::from_fn(9, 9, |_, _| rng.random_range(-1.0..=1.0));
        let s = State {
            n: 1,
            t: 0.0,
            u_curr: field(),
            u_prev: field(),
            v_curr: field(),
            v_prev: field(),
        };
        let next = step(&s, &m, &g, &opts).unwrap();
        let lhs1 = generalized_apply(&m.a, &m.a, &next.u_curr, rt).unwrap() + &m.r * &next.v_curr * c.a2;
        let rhs1 = generalized_apply(&m.b, &m.b, &s.u_curr, rt).unwrap()
            - generalized_apply(&m.a, &m.a, &s.u_prev, rt).unwrap()
            + &m.r * (&s.v_curr * c.b2 - &s.v_prev * c.a2);
        let f = fhat(&nonlinearity(&s.u_prev), &nonlinearity(&s.u_curr)).unwrap();
        let lhs2 = &next.v_curr * 0.5 - &m.r * &next.u_curr * c.c2;
        let rhs2 = &m.r * (&s.u_curr * c.c1 + &s.u_prev * c.c2) - &s.v_prev * 0.5 + f;
        worst = worst.max(inf_norm(&(lhs1 - rhs1))).max(inf_norm(&(lhs2 - rhs2)));
    }
    verdict(
        8,
        "reduced-form equivalence",
        worst <= 10.0 * opts.tol,
        start.elapsed(),
        Duration::from_secs(10),
        &format!(
            "10 random states, J=8: worst defect {worst:.2e} <= {:.0e}",
            10.0 * opts.tol
        ),
    );
}

#[test]
fn c09_stability_probe() {
    let start = Instant::now();
    let g = unit_grid(16, 0.25, 1.0);
    let m = build_matrices(&g, false);
    let settings = ProbeSettings {
        epsilon: 0.1,
        n_steps: 100,
        ..Default::default()
    };
    let r = stability_probe(
        &g,
        &m,
        &SolverOptions::default(),
        &settings,
        &Profile::cosine(0.0, 1.0, 1.0),
    )
    .unwrap();
    let t = r.eta_theoretical;
    let roots = [t.eta1, t.eta1_prime, t.eps1, t.eps1_prime];
    let back_sub = roots
        .iter()
        .filter(|x| x.admissible)
        .all(|x| x.residual.abs() <= 1e-10 * t.epsilon.max(1.0));
    let unit = theoretical_eta(1.0, 0.0, 0.0, &coefficients(&g), g.h);
    let closed = (393f64.sqrt() - 19.0) / 16.0;
    let unit_ok = (unit.eta1.value - closed).abs() <= 1e-15 && unit.eta1.residual.abs() <= 1e-10;
    verdict(
        9,
        "stability probe",
        r.eta_found > 0.0 && back_sub && unit_ok,
        start.elapsed(),
        Duration::from_secs(120),
        &format!(
            "eta_found {:.4e} > 0, theoretical eta0 {:.4e}, back-substitution ok {back_sub}, eta1(1, 0) = {:.7}",
            r.eta_found, t.eta0, unit.eta1.value
        ),
    );
}

#[test]
fn c10_round_trip_and_determinism() {
    let start = Instant::now();
    let g = unit_grid(8, 0.25, 1.0);
    let m = build_matrices(&g, false);
    let state = run(
        &g,
        &Profile::cosine(0.0, 1.0, 0.3),
        &m,
        &SolverOptions::default(),
        5,
        StartMethod::Taylor,
        |_| {},
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    write_snapshot(&state.u_curr, state.t, &g, &path).unwrap();
    let (back, header) = read_snapshot(&path).unwrap();
    let round_trip = back == state.u_curr && header.t == state.t && header.cells == g.cells;

    let make = || {
        let settings = ProbeSettings {
            epsilon: 0.1,
            n_steps: 10,
            trials: 3,
            seed: 17,
            bisections: 6,
        };
        let probe = stability_probe(
            &g,
            &m,
            &SolverOptions::default(),
            &settings,
            &Profile::cosine(0.0, 1.0, 1.0),
        )
        .unwrap();
        let ops = operator_report(&g, &m, 10, 17);
        let a = Report::new(ReportKind::Stability, &probe, Metadata::new(None, Some(17))).unwrap();
        let b = Report::new(ReportKind::Operators, &ops, Metadata::new(None, Some(17))).unwrap();
        a.to_canonical() + &b.to_canonical()
    };
    let identical = make() == make();
    verdict(
        10,
        "round trip and determinism",
        round_trip && identical,
        start.elapsed(),
        Duration::from_secs(5),
        &format!("snapshot identity {round_trip}, byte-identical reports {identical}"),
    );
}
