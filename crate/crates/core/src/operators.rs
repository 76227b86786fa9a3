//! Structural matrices of the scheme and the Lyapunov operators built on them.
//!
//! `A`, `B` and `R` are the one-dimensional stencils with the Neumann ghost
//! reflection `U_{-1} = U_1`, `U_{J+1} = U_{J-1}` folded into the first and
//! last rows (the doubled corner entries). `W` and `B̃` come from eliminating
//! the auxiliary unknown `V^{n+1}` from the coupled system.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub type Matrix = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    pub omega1: f64,
    pub omega1_bar: f64,
    pub omega2: f64,
}

pub fn coefficients(grid: &GridSpec) -> CoefficientSet {
    let (alpha, sigma, delta) = (grid.alpha, grid.sigma, grid.delta);
    let a1 = 0.5 + 2.0 * alpha * sigma;
    let a2 = -alpha * sigma;
    let c2 = alpha * delta;
    let omega = 2.0 * a2 * c2;
    let omega1 = a1 + 6.0 * omega;
    CoefficientSet {
        a1,
        a2,
        b1: 1.0 - 2.0 * (1.0 - 2.0 * alpha) * sigma,
        b2: (1.0 - 2.0 * alpha) * sigma,
        c1: (1.0 - 2.0 * alpha) * delta,
        c2,
        omega,
        omega1,
        omega1_bar: omega1 + omega,
        omega2: a2 - 4.0 * omega,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeMatrices {
    pub a: Matrix,
    pub b: Matrix,
    pub r: Matrix,
    pub w: Matrix,
    pub btilde: Matrix,
    pub coeffs: CoefficientSet,
    /// Apply the right-hand factor of every Lyapunov operator transposed,
    /// so the y-direction sees the same ghost reflection as x.
    pub right_transpose: bool,
}

/// Tridiagonal `(n × n)` stencil with diagonal `d`, off-diagonals `o`, and
/// the ghost reflection doubling `[0,1]` and `[n-1,n-2]`.
pub fn neumann_tridiagonal(n: usize, d: f64, o: f64) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = d;
        if i > 0 {
            m[(i, i - 1)] = o;
        }
        if i + 1 < n {
            m[(i, i + 1)] = o;
        }
    }
    m[(0, 1)] = 2.0 * o;
    m[(n - 1, n - 2)] = 2.0 * o;
    m
}

pub fn build_matrices(grid: &GridSpec, right_transpose: bool) -> SchemeMatrices {
    let n = grid.side();
    let coeffs = coefficients(grid);
    let a = neumann_tridiagonal(n, coeffs.a1, coeffs.a2);
    let b = neumann_tridiagonal(n, coeffs.b1, coeffs.b2);
    let r = neumann_tridiagonal(n, -2.0, 1.0);
    let r2 = &r * &r;
    let w = &a + &r2 * (2.0 * coeffs.a2 * coeffs.c2);
    let btilde = &b - &r2 * (2.0 * coeffs.a2 * coeffs.c1);
    SchemeMatrices {
        a,
        b,
        r,
        w,
        btilde,
        coeffs,
        right_transpose,
    }
}

fn check_square(name: &str, m: &Matrix, side: usize) -> Result<()> {
    if m.nrows() != side || m.ncols() != side {
        return Err(Error::mismatch(format!(
            "{name} is {}x{}, expected {side}x{side}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `L_Q(X) = QX + XQ`.
pub fn lyapunov_apply(q: &Matrix, x: &Matrix) -> Result<Matrix> {
    generalized_apply(q, q, x, false)
}

/// `PX + XQ`, or `PX + XQᵀ` when `right_transpose` is set.
pub fn generalized_apply(p: &Matrix, q: &Matrix, x: &Matrix, right_transpose: bool) -> Result<Matrix> {
    let n = x.nrows();
    check_square("X", x, n)?;
    check_square("P", p, n)?;
    check_square("Q", q, n)?;
    Ok(apply_unchecked(p, q, x, right_transpose))
}

pub(crate) fn apply_unchecked(p: &Matrix, q: &Matrix, x: &Matrix, right_transpose: bool) -> Matrix {
    let mut out = p * x;
    if right_transpose {
        out.gemm(1.0, x, &q.transpose(), 1.0);
    } else {
        out.gemm(1.0, x, q, 1.0);
    }
    out
}

/// Operator ∞-norm: maximum absolute row sum.
pub fn inf_norm(x: &Matrix) -> f64 {
    x.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Nodal max norm `max |x_jm|` of a grid function; the vector norm that
/// induces [`inf_norm`]. Used for defects and errors measured pointwise.
pub fn max_abs(x: &Matrix) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn shifted_norm(m: &Matrix) -> f64 {
    let mut s = m.clone();
    for i in 0..s.nrows() {
        s[(i, i)] -= 0.5;
    }
    inf_norm(&s)
}

/// `‖W − ½I‖ + ‖A − ½I‖`, the computable bound on `‖L_{W,A} − I‖`.
pub fn lyapunov_deviation(grid: &GridSpec) -> f64 {
    let mats = build_matrices(grid, false);
    contraction_factor(&mats.w, &mats.a, false)
}

/// Bound on `‖L_{P,Q} − I‖` in the ∞-norm for either variant. With the
/// right factor transposed the bound uses `‖Qᵀ − ½I‖`, since
/// `‖X Qᵀ‖ ≤ ‖X‖ ‖Qᵀ‖`.
pub fn contraction_factor(p: &Matrix, q: &Matrix, right_transpose: bool) -> f64 {
    let right = if right_transpose {
        shifted_norm(&q.transpose())
    } else {
        shifted_norm(q)
    };
    shifted_norm(p) + right
}
