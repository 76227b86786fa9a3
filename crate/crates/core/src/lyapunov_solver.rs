//! Solvers for the per-step generalized Lyapunov equation `W X + X A = C`.
//!
//! The production path is a fixed-point iteration on the splitting
//! `L_{W,A} = I + (L_{W,A} − I)`: each sweep adds the current residual,
//! `X ← X + (C − W X − X A)`, so residuals shrink by at least the factor
//! `q = ‖W − ½I‖ + ‖A − ½I‖` per sweep. The Kronecker path solves the
//! vectorized `(n² × n²)` system densely and serves as the oracle and the
//! solvability check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operators::{apply_unchecked, build_matrices, contraction_factor, inf_norm, Matrix};

/// Largest matrix side accepted by the dense Kronecker path.
pub const DEFAULT_KRONECKER_CAP: usize = 33;
pub const DEFAULT_PIVOT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    Kronecker,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub right_transpose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: Method::FixedPoint,
            tol: 1e-12,
            max_iter: 200,
            right_transpose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveCertificate {
    pub iterations: usize,
    pub contraction_factor: f64,
    pub residual_norm: f64,
    pub method_used: Method,
}

fn check_inputs(w: &Matrix, a: &Matrix, c: &Matrix) -> Result<usize> {
    let n = c.nrows();
    for (name, m) in [("W", w), ("A", a), ("C", c)] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::mismatch(format!(
                "{name} is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    Ok(n)
}

pub fn residual(w: &Matrix, a: &Matrix, x: &Matrix, c: &Matrix, right_transpose: bool) -> Matrix {
    c - apply_unchecked(w, a, x, right_transpose)
}

pub fn solve_fixed_point(
    w: &Matrix,
    a: &Matrix,
    c: &Matrix,
    opts: &SolverOptions,
) -> Result<(Matrix, SolveCertificate)> {
    check_inputs(w, a, c)?;
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidArgument(format!(
            "solver needs tol > 0 and max_iter >= 1 (tol = {}, max_iter = {})",
            opts.tol, opts.max_iter
        )));
    }
    let q = contraction_factor(w, a, opts.right_transpose);
    if !(q < 1.0) {
        return Err(Error::ContractionViolation { q });
    }

    let mut x = c.clone();
    let mut iterations = 1;
    loop {
        let r = residual(w, a, &x, c, opts.right_transpose);
        let norm = inf_norm(&r);
        if norm <= opts.tol {
            let cert = SolveCertificate {
                iterations,
                contraction_factor: q,
                residual_norm: norm,
                method_used: Method::FixedPoint,
            };
            return Ok((x, cert));
        }
        if iterations >= opts.max_iter || !norm.is_finite() {
            return Err(Error::NonConvergence {
                iterations,
                residual: norm,
            });
        }
        x += r;
        iterations += 1;
    }
}

/// Residual norms of successive fixed-point iterates, for studying the
/// contraction. Runs exactly `sweeps` sweeps.
pub fn fixed_point_history(
    w: &Matrix,
    a: &Matrix,
    c: &Matrix,
    right_transpose: bool,
    sweeps: usize,
) -> Result<Vec<f64>> {
    check_inputs(w, a, c)?;
    let mut x = c.clone();
    let mut out = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        let r = residual(w, a, &x, c, right_transpose);
        out.push(inf_norm(&r));
        x += r;
    }
    Ok(out)
}

/// `I ⊗ W + Aᵀ ⊗ I` (or `A ⊗ I` for the transposed variant), acting on the
/// column-major `vec(X)`.
pub fn kronecker_matrix(w: &Matrix, a: &Matrix, right_transpose: bool) -> Matrix {
    let n = w.nrows();
    let mut k = Matrix::zeros(n * n, n * n);
    for col in 0..n {
        k.view_mut((col * n, col * n), (n, n)).copy_from(w);
    }
    // vec(X A)  : block (col, kc) gets A[kc, col] · I
    // vec(X Aᵀ) : block (col, kc) gets A[col, kc] · I
    for col in 0..n {
        for kc in 0..n {
            let coef = if right_transpose { a[(col, kc)] } else { a[(kc, col)] };
            if coef != 0.0 {
                for i in 0..n {
                    k[(col * n + i, kc * n + i)] += coef;
                }
            }
        }
    }
    k
}

pub mod lu {
    //! Dense Gaussian elimination with partial pivoting.

    use super::Matrix;
    use crate::error::{Error, Result};

    pub struct Factorization {
        lu: Matrix,
        perm: Vec<usize>,
        pub min_pivot: f64,
    }

    /// Factors `m` in place. Fails when a pivot falls below
    /// `threshold · max|m_ij|`.
    pub fn factor(mut m: Matrix, threshold: f64) -> Result<Factorization> {
        let n = m.nrows();
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let cutoff = threshold * scale;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, m[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(pv);
            if !(pv > cutoff) {
                return Err(Error::Singular {
                    pivot: pv,
                    threshold: cutoff,
                });
            }
            if p != k {
                m.swap_rows(p, k);
                perm.swap(p, k);
            }
            let pivot = m[(k, k)];
            for i in k + 1..n {
                let f = m[(i, k)] / pivot;
                if f == 0.0 {
                    continue;
                }
                m[(i, k)] = f;
                for j in k + 1..n {
                    let u = m[(k, j)];
                    m[(i, j)] -= f * u;
                }
            }
        }
        Ok(Factorization { lu: m, perm, min_pivot })
    }

    impl Factorization {
        pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
            let n = self.perm.len();
            let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
            for i in 0..n {
                let s: f64 = (0..i).map(|j| self.lu[(i, j)] * y[j]).sum();
                y[i] -= s;
            }
            for i in (0..n).rev() {
                let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * y[j]).sum();
                y[i] = (y[i] - s) / self.lu[(i, i)];
            }
            y
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { side: n, cap });
    }
    Ok(())
}

pub fn solve_kronecker(w: &Matrix, a: &Matrix, c: &Matrix, right_transpose: bool) -> Result<Matrix> {
    solve_kronecker_with(w, a, c, right_transpose, DEFAULT_KRONECKER_CAP, DEFAULT_PIVOT_THRESHOLD)
}

pub fn solve_kronecker_with(
    w: &Matrix,
    a: &Matrix,
    c: &Matrix,
    right_transpose: bool,
    cap: usize,
    threshold: f64,
) -> Result<Matrix> {
    let n = check_inputs(w, a, c)?;
    check_cap(n, cap)?;
    let fact = lu::factor(kronecker_matrix(w, a, right_transpose), threshold)?;
    let x = fact.solve(c.as_slice());
    Ok(Matrix::from_vec(n, n, x))
}

/// Solves with the method named in `opts`, always returning a certificate
/// whose residual is recomputed from the returned solution.
pub fn solve(w: &Matrix, a: &Matrix, c: &Matrix, opts: &SolverOptions) -> Result<(Matrix, SolveCertificate)> {
    match opts.method {
        Method::FixedPoint => solve_fixed_point(w, a, c, opts),
        Method::Kronecker => {
            let x = solve_kronecker(w, a, c, opts.right_transpose)?;
            let cert = SolveCertificate {
                iterations: 1,
                contraction_factor: contraction_factor(w, a, opts.right_transpose),
                residual_norm: inf_norm(&residual(w, a, &x, c, opts.right_transpose)),
                method_used: Method::Kronecker,
            };
            Ok((x, cert))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solvability {
    pub invertible: bool,
    pub min_pivot: f64,
}

/// Runs pivoted elimination on the vectorized `L_{W,A}` of this grid and
/// reports whether every pivot clears the threshold.
pub fn solvability_check(grid: &GridSpec, right_transpose: bool) -> Result<Solvability> {
    let n = grid.side();
    check_cap(n, DEFAULT_KRONECKER_CAP)?;
    let mats = build_matrices(grid, right_transpose);
    match lu::factor(
        kronecker_matrix(&mats.w, &mats.a, right_transpose),
        DEFAULT_PIVOT_THRESHOLD,
    ) {
        Ok(f) => Ok(Solvability {
            invertible: true,
            min_pivot: f.min_pivot,
        }),
        Err(Error::Singular { pivot, .. }) => Ok(Solvability {
            invertible: false,
            min_pivot: pivot,
        }),
        Err(e) => Err(e),
    }
}
