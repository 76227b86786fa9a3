use rayon::prelude::*;

use super::{orders, RefinementLevel, RefinementStudy};
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::lyapunov_solver::SolverOptions;
use crate::operators::{build_matrices, max_abs};
use crate::profile::Profile;
use crate::stepper::{run, StartMethod};

/// Self-convergence study: runs the scheme on `levels` successively halved
/// meshes up to the common time `T = t0 + n_steps_base · l_base`, then
/// compares each level with the next finer one on the coarser nodes.
///
/// The step count at level `k` is `n_steps_base · (l_base / l_k)` rounded,
/// and `l_k` is adjusted to land exactly on `T`.
pub fn convergence_study(
    profile: &Profile,
    grid_base: &GridSpec,
    levels: usize,
    n_steps_base: usize,
    opts: &SolverOptions,
) -> Result<RefinementStudy> {
    if levels < 3 {
        return Err(Error::InvalidArgument(format!(
            "convergence study needs at least 3 levels, got {levels}"
        )));
    }
    let horizon = n_steps_base as f64 * grid_base.l;
    let plans = (0..levels)
        .map(|k| {
            let g = grid_base.refined(grid_base.cells << k)?;
            let steps = ((n_steps_base as f64) * grid_base.l / g.l).round().max(1.0) as usize;
            let g = if n_steps_base == 0 {
                g
            } else {
                g.with_step(horizon / steps as f64)?
            };
            Ok((g, if n_steps_base == 0 { 0 } else { steps }))
        })
        .collect::<Result<Vec<_>>>()?;

    let finals = plans
        .par_iter()
        .map(|(g, steps)| {
            let mats = build_matrices(g, opts.right_transpose);
            // run() leaves U at level steps + 1; step 0 means the initial data
            if *steps == 0 {
                return Ok(g.sample(|x, y| profile.u(x, y, g.t0)));
            }
            let s = run(g, profile, &mats, opts, steps - 1, StartMethod::Taylor, |_| {})?;
            Ok(s.u_curr)
        })
        .collect::<Result<Vec<Field>>>()?;

    let mut diffs = Vec::with_capacity(levels - 1);
    for k in 0..levels - 1 {
        let coarse = &finals[k];
        let fine = &finals[k + 1];
        let n = coarse.nrows();
        let restricted = Field::from_fn(n, n, |j, m| fine[(2 * j, 2 * m)]);
        diffs.push(max_abs(&(restricted - coarse)));
    }

    let rows = plans
        .iter()
        .enumerate()
        .map(|(k, (g, _))| RefinementLevel {
            cells: g.cells,
            h: g.h,
            l: g.l,
            residual_eq1: None,
            residual_eq2: None,
            solution_error: (k > 0).then(|| diffs[k - 1]),
        })
        .collect();
    Ok(RefinementStudy {
        levels: rows,
        observed_orders: vec![orders(&diffs)],
        quantities: vec!["solution_difference".into()],
    })
}
