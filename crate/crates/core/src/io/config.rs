//! JSON run configuration.
//!
//! Every section has documented defaults; unknown keys are rejected. After
//! validation the derived time step is written back into `coupling.l`, so
//! the echoed document records the step actually used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{build_grid, build_grid_explicit, GridSpec};
use crate::lyapunov_solver::{Method, SolverOptions};
use crate::profile::{Mode, Profile};
use crate::stepper::StartMethod;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "J")]
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    Coupled,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Coupling {
    pub mode: CouplingMode,
    pub s: f64,
    pub eps: f64,
    pub l: Option<f64>,
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling {
            mode: CouplingMode::Coupled,
            s: 1.0,
            eps: 1.0,
            l: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scheme {
    pub alpha: f64,
    pub right_transpose: bool,
    pub legacy_cid2: bool,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme {
            alpha: 0.25,
            right_transpose: false,
            legacy_cid2: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Solver {
    fn default() -> Self {
        let d = SolverOptions::default();
        Solver {
            method: d.method,
            tol: d.tol,
            max_iter: d.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileParameters {
    /// Cosine modes; defaults to the single `(1, 1)` mode.
    pub modes: Option<Vec<Mode>>,
    pub decay: f64,
    /// Affine profile `c0 + bx·x + by·y`.
    pub c0: f64,
    pub bx: f64,
    pub by: f64,
}

impl Default for ProfileParameters {
    fn default() -> Self {
        ProfileParameters {
            modes: None,
            decay: 0.0,
            c0: 0.0,
            bx: 0.0,
            by: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub profile: String,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub parameters: ProfileParameters,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub t0: f64,
    pub n_steps: usize,
    /// Write a snapshot every this many steps; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            t0: 0.0,
            n_steps: 100,
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub directory: String,
    /// Significant digits in snapshot files.
    pub precision: usize,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            directory: "out".into(),
            precision: 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Domain,
    pub grid: GridSection,
    #[serde(default)]
    pub coupling: Coupling,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub solver: Solver,
    pub initial: Initial,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: Output,
}

pub const PROFILE_NAMES: [&str; 4] = ["zero", "constant", "cosine", "affine"];

fn invalid(key: &str, constraint: impl Into<String>) -> Error {
    Error::ConfigValidation {
        key: key.into(),
        constraint: constraint.into(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    let grid = cfg.grid_spec()?;
    cfg.coupling.l = Some(grid.l);
    Ok(cfg)
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if !(d.l1 > d.l0) {
            return Err(invalid(
                "domain.L1",
                format!("must exceed domain.L0 (got {} <= {})", d.l1, d.l0),
            ));
        }
        if self.grid.cells < 2 {
            return Err(invalid("grid.J", format!("must be >= 2 (got {})", self.grid.cells)));
        }
        let alpha = self.scheme.alpha;
        if !(0.0..=0.5).contains(&alpha) {
            return Err(invalid("scheme.alpha", format!("∉ [0, 0.5] (got {alpha})")));
        }
        match self.coupling.mode {
            CouplingMode::Coupled => {
                if !(self.coupling.s > 0.0) {
                    return Err(invalid("coupling.s", format!("must be > 0 (got {})", self.coupling.s)));
                }
                if !(self.coupling.eps > 0.0) {
                    return Err(invalid(
                        "coupling.eps",
                        format!("must be > 0 (got {})", self.coupling.eps),
                    ));
                }
            }
            CouplingMode::Explicit => match self.coupling.l {
                Some(l) if l > 0.0 => {}
                Some(l) => return Err(invalid("coupling.l", format!("must be > 0 (got {l})"))),
                None => return Err(invalid("coupling.l", "required when coupling.mode is \"explicit\"")),
            },
        }
        if !(self.solver.tol > 0.0) {
            return Err(invalid("solver.tol", format!("must be > 0 (got {})", self.solver.tol)));
        }
        if self.solver.max_iter == 0 {
            return Err(invalid("solver.max_iter", "must be >= 1"));
        }
        if !PROFILE_NAMES.contains(&self.initial.profile.as_str()) {
            return Err(invalid(
                "initial.profile",
                format!("must be one of {:?} (got {:?})", PROFILE_NAMES, self.initial.profile),
            ));
        }
        if !self.initial.amplitude.is_finite() {
            return Err(invalid("initial.amplitude", "must be finite"));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(invalid(
                "output.precision",
                format!("∉ [1, 17] (got {})", self.output.precision),
            ));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let (d, c) = (&self.domain, &self.coupling);
        match c.mode {
            CouplingMode::Coupled => {
                build_grid(d.l0, d.l1, self.grid.cells, self.scheme.alpha, c.s, c.eps, self.run.t0)
            }
            CouplingMode::Explicit => build_grid_explicit(
                d.l0,
                d.l1,
                self.grid.cells,
                self.scheme.alpha,
                c.l.unwrap_or(0.0),
                self.run.t0,
            ),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            method: self.solver.method,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            right_transpose: self.scheme.right_transpose,
        }
    }

    pub fn start_method(&self) -> StartMethod {
        if self.scheme.legacy_cid2 {
            StartMethod::PrintedCid2
        } else {
            StartMethod::Taylor
        }
    }

    pub fn profile(&self) -> Profile {
        let p = &self.initial.parameters;
        let (l0, l1) = (self.domain.l0, self.domain.l1);
        let base = match self.initial.profile.as_str() {
            "zero" => Profile::zero(),
            "constant" => Profile::constant(1.0),
            "affine" => Profile::affine(p.c0, p.bx, p.by),
            _ => match &p.modes {
                Some(modes) => Profile::cosine_modes(l0, l1, 1.0, modes.clone()),
                None => Profile::cosine(l0, l1, 1.0),
            },
        };
        let amplitude = if self.initial.profile == "zero" {
            0.0
        } else {
            self.initial.amplitude
        };
        base.with_amplitude(amplitude).with_decay(p.decay)
    }

    /// Canonical pretty-printed JSON of the validated configuration.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "domain": {"L0": 0, "L1": 1},
        "grid": {"J": 10},
        "initial": {"profile": "cosine"}
    }"#;

    #[test]
    fn defaults_filled() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scheme.alpha, 0.25);
        assert_eq!(c.coupling.s, 1.0);
        assert_eq!(c.coupling.eps, 1.0);
        assert_eq!(c.solver.tol, 1e-12);
        assert_eq!(c.solver.max_iter, 200);
        assert_eq!(c.solver.method, Method::FixedPoint);
        assert!(!c.scheme.right_transpose);
        assert_eq!(c.output.precision, 17);
        assert!((c.coupling.l.unwrap() - 0.001).abs() < 1e-15);
        assert!(c.echo().contains("\"l\": 0.001"));
    }

    #[test]
    fn alpha_out_of_range() {
        let text = MINIMAL.replace(r#""grid""#, r#""scheme": {"alpha": 0.7}, "grid""#);
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("scheme.alpha ∉ [0, 0.5]"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace(r#""grid": {"J": 10}"#, r#""grid": {"J": 10, "K": 3}"#);
        assert!(matches!(parse_config(&text), Err(Error::ConfigParse { .. })));
    }

    #[test]
    fn parse_error_position() {
        match parse_config("{\n  \"domain\": ,\n}") {
            Err(Error::ConfigParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_mode_requires_l() {
        let text = MINIMAL.replace(r#""grid""#, r#""coupling": {"mode": "explicit"}, "grid""#);
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("coupling.l"));
        let text = MINIMAL.replace(r#""grid""#, r#""coupling": {"mode": "explicit", "l": 0.1}, "grid""#);
        let c = parse_config(&text).unwrap();
        assert!(!c.grid_spec().unwrap().coupled);
    }

    #[test]
    fn echo_is_deterministic_and_reparses() {
        let a = parse_config(MINIMAL).unwrap();
        let b = parse_config(MINIMAL).unwrap();
        assert_eq!(a.echo(), b.echo());
        assert_eq!(parse_config(&a.echo()).unwrap(), a);
    }

    #[test]
    fn unknown_profile() {
        let text = MINIMAL.replace("cosine", "soliton");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("initial.profile"));
    }
}
