//! Space-time discretization of the square domain `]L0, L1[²`.
//!
//! The time step is tied to the mesh through `l = eps · h^(2+s)`; under that
//! coupling the per-step Lyapunov operator tends to the identity as `h → 0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodal values on the `(J+1) × (J+1)` grid. Row index `j` runs along x,
/// column index `m` along y.
pub type Field = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub l0: f64,
    pub l1: f64,
    /// Cells per side.
    pub cells: usize,
    pub h: f64,
    pub t0: f64,
    pub l: f64,
    pub alpha: f64,
    /// Coupling exponent. `None` when it cannot be recovered from an
    /// explicit step (h >= 1).
    pub s: Option<f64>,
    pub eps: f64,
    pub sigma: f64,
    pub delta: f64,
    /// Whether `l = eps · h^(2+s)` holds with `s > 0`.
    pub coupled: bool,
}

fn validate(l0: f64, l1: f64, cells: usize, alpha: f64) -> Result<()> {
    if !(l1 > l0) {
        return Err(Error::DomainOrder { l0, l1 });
    }
    if cells < 2 {
        return Err(Error::GridSize(cells));
    }
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::Weight(alpha));
    }
    Ok(())
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Builds a grid whose time step follows the coupling `l = eps · h^(2+s)`.
pub fn build_grid(l0: f64, l1: f64, cells: usize, alpha: f64, s: f64, eps: f64, t0: f64) -> Result<GridSpec> {
    validate(l0, l1, cells, alpha)?;
    positive("eps", eps)?;
    positive("s", s)?;
    let h = (l1 - l0) / cells as f64;
    let l = eps * h.powf(2.0 + s);
    Ok(GridSpec {
        l0,
        l1,
        cells,
        h,
        t0,
        l,
        alpha,
        s: Some(s),
        eps,
        sigma: l * l / (h * h),
        delta: 1.0 / (h * h),
        coupled: true,
    })
}

/// Builds a grid with a directly chosen time step. The coupling exponent is
/// recovered with `eps = 1`; a non-positive exponent marks the grid uncoupled.
pub fn build_grid_explicit(l0: f64, l1: f64, cells: usize, alpha: f64, l: f64, t0: f64) -> Result<GridSpec> {
    validate(l0, l1, cells, alpha)?;
    positive("l", l)?;
    let h = (l1 - l0) / cells as f64;
    let s = (h < 1.0).then(|| l.ln() / h.ln() - 2.0);
    Ok(GridSpec {
        l0,
        l1,
        cells,
        h,
        t0,
        l,
        alpha,
        s,
        eps: 1.0,
        sigma: l * l / (h * h),
        delta: 1.0 / (h * h),
        coupled: s.is_some_and(|s| s > 0.0),
    })
}

impl GridSpec {
    /// Matrix side, `J + 1`.
    pub fn side(&self) -> usize {
        self.cells + 1
    }

    pub fn node_coordinates(&self, j: usize, m: usize) -> Result<(f64, f64)> {
        if j > self.cells || m > self.cells {
            return Err(Error::IndexOutOfRange { j, m, max: self.cells });
        }
        Ok((self.coord(j), self.coord(m)))
    }

    /// `L0 + i·h`, snapping the last node onto `L1`.
    pub(crate) fn coord(&self, i: usize) -> f64 {
        if i == self.cells {
            self.l1
        } else {
            self.l0 + i as f64 * self.h
        }
    }

    /// Samples `f(x_j, y_m)` on every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Field {
        let n = self.side();
        DMatrix::from_fn(n, n, |j, m| f(self.coord(j), self.coord(m)))
    }

    /// Time of level `n`.
    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.l
    }

    /// Same mesh with a different number of cells and the time step
    /// recomputed from the coupling (or scaled as `h^(2+s)` if explicit).
    pub fn refined(&self, cells: usize) -> Result<GridSpec> {
        match self.s {
            Some(s) if self.coupled => build_grid(self.l0, self.l1, cells, self.alpha, s, self.eps, self.t0),
            _ => {
                let ratio = self.cells as f64 / cells as f64;
                build_grid_explicit(self.l0, self.l1, cells, self.alpha, self.l * ratio * ratio, self.t0)
            }
        }
    }

    /// Copy of this grid with a different time step and everything derived
    /// from it recomputed. The coupling record is kept.
    pub fn with_step(&self, l: f64) -> Result<GridSpec> {
        positive("l", l)?;
        Ok(GridSpec {
            l,
            sigma: l * l / (self.h * self.h),
            ..*self
        })
    }
}
