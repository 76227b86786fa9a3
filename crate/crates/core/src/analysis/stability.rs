//! Empirical Lyapunov-stability probe.
//!
//! Searches for the largest initial size `η` such that every randomized
//! trial started with `‖(U⁰, V⁰)‖ = η` keeps `‖(Uⁿ, Vⁿ)‖ ≤ ε` over the
//! probed horizon. Only finite horizons can be checked.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eta::{theoretical_eta, EtaBounds};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::lyapunov_solver::SolverOptions;
use crate::operators::{inf_norm, SchemeMatrices};
use crate::profile::Profile;
use crate::stepper::{discrete_v, initialize, pair_norm, step};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub epsilon: f64,
    pub n_steps: usize,
    pub trials: usize,
    pub seed: u64,
    /// Bisection steps on the amplitude.
    pub bisections: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            epsilon: 0.1,
            n_steps: 100,
            trials: 8,
            seed: 0,
            bisections: 20,
        }
    }
}

/// One tested amplitude and the largest pair norm each trial reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub amplitude: f64,
    pub accepted: bool,
    pub initial_norms: Vec<f64>,
    pub max_norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityProbeResult {
    pub epsilon: f64,
    pub eta_found: f64,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub eta_theoretical: EtaBounds,
    pub log: Vec<ProbeRecord>,
}

/// Factor on the shape's amplitude giving an initial pair norm just below
/// `target`, or `None` if the shape is identically zero on the grid.
fn scale_for(profile: &Profile, grid: &GridSpec, mats: &SchemeMatrices, target: f64) -> Result<Option<f64>> {
    let norm_at = |amp: f64| -> Result<f64> {
        let scaled = profile.clone().with_amplitude(profile.amplitude * amp);
        let u0 = grid.sample(|x, y| scaled.u(x, y, grid.t0));
        let v0 = discrete_v(&u0, grid, &mats.r)?;
        Ok(pair_norm(&u0, &v0))
    };
    if norm_at(1.0)? == 0.0 {
        return Ok(None);
    }
    if target == 0.0 {
        return Ok(Some(0.0));
    }
    let mut hi = 1.0;
    while norm_at(hi)? < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Runs one trial and returns `(initial pair norm, max pair norm)`. Stops
/// early once the bound is exceeded; a blow-up counts as unbounded.
fn trial(
    shape: &Profile,
    grid: &GridSpec,
    mats: &SchemeMatrices,
    opts: &SolverOptions,
    amplitude: f64,
    settings: &ProbeSettings,
) -> Result<(f64, f64)> {
    let amp = scale_for(shape, grid, mats, amplitude)?.unwrap_or(0.0);
    let profile = shape.clone().with_amplitude(shape.amplitude * amp);
    let mut state = initialize(grid, &profile, mats)?;
    let initial = pair_norm(&state.u_prev, &state.v_prev);
    let mut worst = initial.max(state.pair_norm());
    for _ in 0..settings.n_steps {
        if worst > settings.epsilon {
            break;
        }
        match step(&state, mats, grid, opts) {
            Ok(next) => state = next,
            Err(e) if e.is_numerical() => return Ok((initial, f64::INFINITY)),
            Err(e) => return Err(e),
        }
        worst = worst.max(state.pair_norm());
    }
    Ok((initial, worst))
}

pub fn stability_probe(
    grid: &GridSpec,
    mats: &SchemeMatrices,
    opts: &SolverOptions,
    settings: &ProbeSettings,
    family: &Profile,
) -> Result<StabilityProbeResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let trials = settings.trials.max(1);
    let shapes: Vec<Profile> = (0..trials)
        .map(|_| {
            let v = family.variant(&mut rng);
            let sign = if v.amplitude == 0.0 { 0.0 } else { v.amplitude.signum() };
            v.with_amplitude(sign)
        })
        .collect();

    let mut log = Vec::new();
    let mut test = |amplitude: f64| -> Result<bool> {
        let runs = shapes
            .par_iter()
            .map(|s| trial(s, grid, mats, opts, amplitude, settings))
            .collect::<Result<Vec<_>>>()?;
        let accepted = runs.iter().all(|&(_, m)| m <= settings.epsilon);
        log.push(ProbeRecord {
            amplitude,
            accepted,
            initial_norms: runs.iter().map(|r| r.0).collect(),
            max_norms: runs.iter().map(|r| r.1).collect(),
        });
        Ok(accepted)
    };

    let eta_found = if test(settings.epsilon)? {
        settings.epsilon
    } else {
        let (mut lo, mut hi) = (0.0, settings.epsilon);
        for _ in 0..settings.bisections {
            let mid = 0.5 * (lo + hi);
            if test(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };

    let phi = grid.sample(|x, y| family.phi(x, y, grid.t0));
    let eta_theoretical = theoretical_eta(settings.epsilon, grid.l, inf_norm(&phi), &mats.coeffs, grid.h);
    Ok(StabilityProbeResult {
        epsilon: settings.epsilon,
        eta_found,
        steps: settings.n_steps,
        trials,
        seed: settings.seed,
        eta_theoretical,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::operators::build_matrices;

    fn settings(epsilon: f64) -> ProbeSettings {
        ProbeSettings {
            epsilon,
            n_steps: 20,
            trials: 3,
            seed: 5,
            bisections: 8,
        }
    }

    #[test]
    fn zero_family_is_trivially_bounded() {
        let g = build_grid(0.0, 1.0, 8, 0.25, 1.0, 1.0, 0.0).unwrap();
        let m = build_matrices(&g, false);
        let r = stability_probe(&g, &m, &SolverOptions::default(), &settings(0.5), &Profile::zero()).unwrap();
        assert!(r.eta_found >= 0.0);
        assert!(r.log.iter().flat_map(|l| &l.max_norms).all(|&n| n == 0.0));
    }

    #[test]
    fn constant_family_accepts_up_to_epsilon() {
        let g = build_grid(0.0, 1.0, 8, 0.25, 1.0, 1.0, 0.0).unwrap();
        let m = build_matrices(&g, true);
        let r = stability_probe(
            &g,
            &m,
            &SolverOptions::default(),
            &settings(2.0),
            &Profile::constant(1.0),
        )
        .unwrap();
        assert!(r.eta_found >= 1.9, "{}", r.eta_found);
    }

    #[test]
    fn accepted_amplitudes_were_run() {
        let g = build_grid(0.0, 1.0, 8, 0.25, 1.0, 1.0, 0.0).unwrap();
        let m = build_matrices(&g, false);
        let r = stability_probe(
            &g,
            &m,
            &SolverOptions::default(),
            &settings(0.1),
            &Profile::cosine(0.0, 1.0, 1.0),
        )
        .unwrap();
        assert!(r.eta_found > 0.0);
        let rec = r.log.iter().find(|l| l.amplitude == r.eta_found).unwrap();
        assert!(rec.accepted);
        assert!(rec.max_norms.iter().all(|&n| n <= 0.1));
        assert!(rec.initial_norms.iter().all(|&n| n <= r.eta_found * (1.0 + 1e-12)));
    }
}
