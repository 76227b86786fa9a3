//! Order-reduced finite-difference scheme for the two-dimensional
//! Boussinesq equation
//!
//! ```text
//! u_tt = Δu + (u² + u_xx)_xx
//! ```
//!
//! on a square with homogeneous Neumann boundaries. The auxiliary
//! `v = u_xx + u²` splits the fourth-order problem into a coupled pair,
//! and each time step reduces to one generalized Lyapunov equation
//! `W X + X A = C`.
//!
//! ```
//! use boussinesq_core::{build_grid, build_matrices, initialize, step, Profile, SolverOptions};
//!
//! let grid = build_grid(0.0, 1.0, 8, 0.25, 1.0, 1.0, 0.0).unwrap();
//! let mats = build_matrices(&grid, true);
//! let state = initialize(&grid, &Profile::constant(0.5), &mats).unwrap();
//! let next = step(&state, &mats, &grid, &SolverOptions { right_transpose: true, ..Default::default() }).unwrap();
//! assert!((next.u_curr[(3, 3)] - 0.5).abs() < 1e-10);
//! ```

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod grid;
pub mod io;
pub mod lyapunov_solver;
pub mod operators;
pub mod profile;
pub mod stepper;

pub use error::{Error, Result};
pub use grid::{build_grid, build_grid_explicit, Field, GridSpec};
pub use lyapunov_solver::{solvability_check, solve, Method, SolveCertificate, SolverOptions};
pub use operators::{
    build_matrices, coefficients, generalized_apply, lyapunov_apply, lyapunov_deviation, CoefficientSet, Matrix,
    SchemeMatrices,
};
pub use profile::{Mode, Profile};
pub use stepper::{initialize, initialize_with, run, step, StartMethod, State};
