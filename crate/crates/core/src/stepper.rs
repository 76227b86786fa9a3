//! Time stepping of the order-reduced system.
//!
//! With `v = u_xx + u²`, each step eliminates `V^{n+1}` and solves
//!
//! ```text
//! W U^{n+1} + U^{n+1} A = B̃ Uⁿ + Uⁿ B + b2 R Vⁿ − (W U^{n−1} + U^{n−1} A) − a2 R (F^{n−1} + Fⁿ)
//! ```
//!
//! for `U^{n+1}`, then recovers
//! `V^{n+1} = 2 c2 R U^{n+1} + 2 R (c1 Uⁿ + c2 U^{n−1}) − V^{n−1} + 2 F̂ⁿ`.
//! The nonlinearity only enters through known levels, so every step is a
//! single linear solve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::lyapunov_solver::{solve, SolveCertificate, SolverOptions};
use crate::operators::{apply_unchecked, inf_norm, Matrix, SchemeMatrices};
use crate::profile::Profile;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub n: usize,
    pub t: f64,
    pub u_curr: Field,
    pub u_prev: Field,
    pub v_curr: Field,
    pub v_prev: Field,
}

impl State {
    pub fn side(&self) -> usize {
        self.u_curr.nrows()
    }

    /// `max(‖Uⁿ‖, ‖Vⁿ‖)`.
    pub fn pair_norm(&self) -> f64 {
        pair_norm(&self.u_curr, &self.v_curr)
    }

    fn is_finite(&self) -> bool {
        self.u_curr.iter().chain(self.v_curr.iter()).all(|v| v.is_finite())
    }
}

pub fn pair_norm(u: &Field, v: &Field) -> f64 {
    inf_norm(u).max(inf_norm(v))
}

/// How `U¹` is produced from the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMethod {
    /// `U¹ = U⁰ + lΦ + (l²/2)(Δ_h U⁰ + δ R V⁰)`.
    #[default]
    Taylor,
    /// `U¹ = u0 + (l²/2) Δu0 + ½ (v0)_xx + lφ` with analytic derivatives,
    /// i.e. the printed start formula with `g = −φ` and no `l²` on the
    /// `(v0)_xx` term. Kept for comparison runs.
    PrintedCid2,
}

pub fn nonlinearity(u: &Field) -> Field {
    u.map(|x| x * x)
}

pub fn fhat(f_prev: &Field, f_curr: &Field) -> Result<Field> {
    if f_prev.shape() != f_curr.shape() {
        return Err(Error::mismatch(format!(
            "F^(n-1) is {:?}, F^n is {:?}",
            f_prev.shape(),
            f_curr.shape()
        )));
    }
    Ok((f_prev + f_curr) * 0.5)
}

/// `V = δ R U + U²`, the discrete `u_xx + u²` with the x-reflection in `R`.
pub fn discrete_v(u: &Field, grid: &GridSpec, r: &Matrix) -> Result<Field> {
    if r.nrows() != u.nrows() || r.ncols() != u.nrows() || u.nrows() != u.ncols() {
        return Err(Error::mismatch(format!("R is {:?}, U is {:?}", r.shape(), u.shape())));
    }
    Ok(r * u * grid.delta + nonlinearity(u))
}

/// Five-point Laplacian with ghost reflection on all four sides.
pub fn discrete_laplacian(u: &Field, grid: &GridSpec, r: &Matrix) -> Field {
    (r * u + u * r.transpose()) * grid.delta
}

pub fn initialize(grid: &GridSpec, profile: &Profile, mats: &SchemeMatrices) -> Result<State> {
    initialize_with(grid, profile, mats, StartMethod::Taylor)
}

pub fn initialize_with(grid: &GridSpec, profile: &Profile, mats: &SchemeMatrices, start: StartMethod) -> Result<State> {
    let t0 = grid.t0;
    let l = grid.l;
    let u0 = grid.sample(|x, y| profile.u(x, y, t0));
    let v0 = discrete_v(&u0, grid, &mats.r)?;
    let u1 = match start {
        StartMethod::Taylor => {
            let phi = grid.sample(|x, y| profile.phi(x, y, t0));
            let accel = discrete_laplacian(&u0, grid, &mats.r) + &mats.r * &v0 * grid.delta;
            &u0 + phi * l + accel * (0.5 * l * l)
        }
        StartMethod::PrintedCid2 => {
            let n = grid.side();
            let mut u1 = Field::zeros(n, n);
            for j in 0..n {
                for m in 0..n {
                    let (x, y) = (grid.coord(j), grid.coord(m));
                    let jet = profile.jet(x, y, t0)?;
                    u1[(j, m)] = jet.u + 0.5 * l * l * jet.laplacian() + 0.5 * jet.v_xx() + l * profile.phi(x, y, t0);
                }
            }
            u1
        }
    };
    let v1 = discrete_v(&u1, grid, &mats.r)?;
    Ok(State {
        n: 1,
        t: grid.time(1),
        u_curr: u1,
        u_prev: u0,
        v_curr: v1,
        v_prev: v0,
    })
}

/// Right-hand side of the reduced `U^{n+1}` equation.
pub fn assemble_rhs(state: &State, mats: &SchemeMatrices) -> Field {
    let rt = mats.right_transpose;
    let c = &mats.coeffs;
    let f_sum = nonlinearity(&state.u_prev) + nonlinearity(&state.u_curr);
    apply_unchecked(&mats.btilde, &mats.b, &state.u_curr, rt) + &mats.r * &state.v_curr * c.b2
        - apply_unchecked(&mats.w, &mats.a, &state.u_prev, rt)
        - &mats.r * f_sum * c.a2
}

/// Recovers `V^{n+1}` from the second equation of the coupled pair.
pub fn update_v(state: &State, u_next: &Field, mats: &SchemeMatrices) -> Field {
    let c = &mats.coeffs;
    let fh = (nonlinearity(&state.u_prev) + nonlinearity(&state.u_curr)) * 0.5;
    &mats.r * u_next * (2.0 * c.c2) + &mats.r * (&state.u_curr * c.c1 + &state.u_prev * c.c2) * 2.0 - &state.v_prev
        + fh * 2.0
}

pub fn step(state: &State, mats: &SchemeMatrices, grid: &GridSpec, opts: &SolverOptions) -> Result<State> {
    step_certified(state, mats, grid, opts).map(|(s, _)| s)
}

/// One step, also returning the solve certificate. The transpose variant is
/// taken from `mats`; `opts.right_transpose` is ignored here.
pub fn step_certified(
    state: &State,
    mats: &SchemeMatrices,
    grid: &GridSpec,
    opts: &SolverOptions,
) -> Result<(State, SolveCertificate)> {
    let n = state.side();
    if mats.a.nrows() != n || grid.side() != n {
        return Err(Error::mismatch(format!(
            "state side {n}, matrices side {}, grid side {}",
            mats.a.nrows(),
            grid.side()
        )));
    }
    let next = state.n + 1;
    let rhs = assemble_rhs(state, mats);
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { step: next });
    }
    let opts = SolverOptions {
        right_transpose: mats.right_transpose,
        ..*opts
    };
    let (u_next, cert) = solve(&mats.w, &mats.a, &rhs, &opts)?;
    let v_next = update_v(state, &u_next, mats);
    let out = State {
        n: next,
        t: grid.time(next),
        u_prev: state.u_curr.clone(),
        v_prev: state.v_curr.clone(),
        u_curr: u_next,
        v_curr: v_next,
    };
    if !out.is_finite() {
        return Err(Error::BlowUp { step: next });
    }
    Ok((out, cert))
}

/// What the observer of [`run`] sees after each step.
pub struct Observation<'a> {
    pub n: usize,
    pub t: f64,
    pub norm_u: f64,
    pub norm_v: f64,
    pub state: &'a State,
}

/// Initializes from `profile` and applies `n_steps` steps. The observer is
/// called after every step (not for the initial state).
pub fn run(
    grid: &GridSpec,
    profile: &Profile,
    mats: &SchemeMatrices,
    opts: &SolverOptions,
    n_steps: usize,
    start: StartMethod,
    mut observer: impl FnMut(&Observation<'_>),
) -> Result<State> {
    let mut state = initialize_with(grid, profile, mats, start)?;
    for _ in 0..n_steps {
        state = step(&state, mats, grid, opts).map_err(|e| match e {
            e @ Error::BlowUp { .. } => e,
            e => Error::AtStep {
                step: state.n + 1,
                source: Box::new(e),
            },
        })?;
        observer(&Observation {
            n: state.n,
            t: state.t,
            norm_u: inf_norm(&state.u_curr),
            norm_v: inf_norm(&state.v_curr),
            state: &state,
        });
    }
    Ok(state)
}
