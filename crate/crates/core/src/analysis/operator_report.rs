use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::operators::{apply_unchecked, contraction_factor, inf_norm, lyapunov_deviation, Matrix, SchemeMatrices};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    pub cells: usize,
    pub alpha: f64,
    pub right_transpose: bool,
    pub samples: usize,
    pub seed: u64,
    /// `‖W − ½I‖ + ‖A − ½I‖`.
    pub lyapunov_deviation: f64,
    /// Deviation bound for the variant in use (equal to the above unless
    /// the right factor is transposed).
    pub contraction_bound: f64,
    /// `2 max(|b1|, 2|b2|) + 4 |a2 c1|`.
    pub btilde_b_bound: f64,
    pub max_btilde_b: f64,
    pub min_lwa: f64,
    pub max_lwa: f64,
    /// `‖L_{W,A}(I)‖` through the operator, and `‖W + A‖` directly.
    pub lwa_identity: f64,
    pub w_plus_a_norm: f64,
    /// `max ‖L_{B̃,B}(X)‖ ≤ 6` (meaningful once `btilde_b_bound ≤ 6`).
    pub btilde_b_within_six: bool,
    /// All sampled `‖L_{W,A}(X)‖` in `[1/2, 3/2]`.
    pub lwa_within_half_band: bool,
    /// Sampled extremes lie in `[1 − bound, 1 + bound]`.
    pub lwa_within_deviation: bool,
}

/// Samples unit-norm random matrices (entries uniform on `[-1, 1]`, then
/// scaled to ∞-norm 1) and records the extreme operator norms of
/// `L_{B̃,B}` and `L_{W,A}` over them.
pub fn operator_report(grid: &GridSpec, mats: &SchemeMatrices, samples: usize, seed: u64) -> OperatorReport {
    let n = grid.side();
    let rt = mats.right_transpose;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_bb = 0.0f64;
    let mut min_lwa = f64::INFINITY;
    let mut max_lwa = 0.0f64;
    for _ in 0..samples.max(1) {
        let x = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let x = &x / inf_norm(&x);
        let bb = inf_norm(&apply_unchecked(&mats.btilde, &mats.b, &x, rt));
        let lwa = inf_norm(&apply_unchecked(&mats.w, &mats.a, &x, rt));
        max_bb = max_bb.max(bb);
        min_lwa = min_lwa.min(lwa);
        max_lwa = max_lwa.max(lwa);
    }
    let c = &mats.coeffs;
    let deviation = lyapunov_deviation(grid);
    let bound = contraction_factor(&mats.w, &mats.a, rt);
    let identity = Matrix::identity(n, n);
    let a_right = if rt { mats.a.transpose() } else { mats.a.clone() };
    let tol = 1e-12;
    OperatorReport {
        cells: grid.cells,
        alpha: grid.alpha,
        right_transpose: rt,
        samples: samples.max(1),
        seed,
        lyapunov_deviation: deviation,
        contraction_bound: bound,
        btilde_b_bound: 2.0 * c.b1.abs().max(2.0 * c.b2.abs()) + 4.0 * (c.a2 * c.c1).abs(),
        max_btilde_b: max_bb,
        min_lwa,
        max_lwa,
        lwa_identity: inf_norm(&apply_unchecked(&mats.w, &mats.a, &identity, rt)),
        w_plus_a_norm: inf_norm(&(&mats.w + a_right)),
        btilde_b_within_six: max_bb <= 6.0,
        lwa_within_half_band: min_lwa >= 0.5 && max_lwa <= 1.5,
        lwa_within_deviation: min_lwa >= 1.0 - bound - tol && max_lwa <= 1.0 + bound + tol,
    }
}
