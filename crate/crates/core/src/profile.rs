//! Initial data and manufactured space-time profiles.
//!
//! Built-in profiles are separable, `u(x, y, t) = amplitude · S(x, y) · e^{-decay·t}`,
//! with closed-form derivatives. Cosine shapes use integer mode numbers on
//! the domain so that `∂u/∂n = 0` holds on the boundary.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub p: u32,
    pub q: u32,
    pub coef: f64,
}

pub type SpatialFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Shape {
    Constant,
    /// `c0 + bx·x + by·y`. Not Neumann-compatible; meant for interior
    /// residual checks only.
    Affine {
        c0: f64,
        bx: f64,
        by: f64,
    },
    /// `Σ coef · cos(p π ξ) cos(q π η)` with `ξ = (x − origin)/length`.
    Cosine {
        modes: Vec<Mode>,
        origin: f64,
        length: f64,
    },
    /// Sampled values only; no analytic derivatives.
    Custom {
        u0: SpatialFn,
        phi: Option<SpatialFn>,
    },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Constant => write!(f, "Constant"),
            Shape::Affine { c0, bx, by } => write!(f, "Affine({c0}, {bx}, {by})"),
            Shape::Cosine { modes, origin, length } => f
                .debug_struct("Cosine")
                .field("modes", modes)
                .field("origin", origin)
                .field("length", length)
                .finish(),
            Shape::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Value and the derivatives the scheme's residuals need, at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub u: f64,
    pub u_x: f64,
    pub u_xx: f64,
    pub u_yy: f64,
    pub u_xxxx: f64,
    pub u_t: f64,
    pub u_tt: f64,
}

impl Jet {
    pub fn laplacian(&self) -> f64 {
        self.u_xx + self.u_yy
    }

    /// `v = u_xx + u²`.
    pub fn v(&self) -> f64 {
        self.u_xx + self.u * self.u
    }

    /// `v_xx = u_xxxx + 2 u_x² + 2 u u_xx`.
    pub fn v_xx(&self) -> f64 {
        self.u_xxxx + 2.0 * self.u_x * self.u_x + 2.0 * self.u * self.u_xx
    }

    /// `u_tt − Δu − v_xx`, the residual of the reduced continuous system.
    pub fn wave_residual(&self) -> f64 {
        self.u_tt - self.laplacian() - self.v_xx()
    }
}

#[derive(Debug, Clone)]
pub struct Profile {
    pub name: String,
    pub shape: Shape,
    pub amplitude: f64,
    pub decay: f64,
}

impl Profile {
    pub fn zero() -> Self {
        Profile {
            name: "zero".into(),
            shape: Shape::Constant,
            amplitude: 0.0,
            decay: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Profile {
            name: "constant".into(),
            shape: Shape::Constant,
            amplitude: c,
            decay: 0.0,
        }
    }

    pub fn affine(c0: f64, bx: f64, by: f64) -> Self {
        Profile {
            name: "affine".into(),
            shape: Shape::Affine { c0, bx, by },
            amplitude: 1.0,
            decay: 0.0,
        }
    }

    /// `amplitude · cos(πξ) cos(πη)` on `[l0, l1]²`.
    pub fn cosine(l0: f64, l1: f64, amplitude: f64) -> Self {
        Self::cosine_modes(l0, l1, amplitude, vec![Mode { p: 1, q: 1, coef: 1.0 }])
    }

    pub fn cosine_modes(l0: f64, l1: f64, amplitude: f64, modes: Vec<Mode>) -> Self {
        Profile {
            name: "cosine".into(),
            shape: Shape::Cosine {
                modes,
                origin: l0,
                length: l1 - l0,
            },
            amplitude,
            decay: 0.0,
        }
    }

    pub fn custom(name: &str, u0: SpatialFn, phi: Option<SpatialFn>) -> Self {
        Profile {
            name: name.into(),
            shape: Shape::Custom { u0, phi },
            amplitude: 1.0,
            decay: 0.0,
        }
    }

    pub fn with_decay(mut self, decay: f64) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn has_derivatives(&self) -> bool {
        !matches!(self.shape, Shape::Custom { .. })
    }

    /// Whether `∂u/∂n = 0` holds analytically on the domain boundary.
    pub fn is_neumann_compatible(&self) -> bool {
        match &self.shape {
            Shape::Constant | Shape::Cosine { .. } => true,
            Shape::Affine { bx, by, .. } => *bx == 0.0 && *by == 0.0,
            Shape::Custom { .. } => false,
        }
    }

    fn time_factor(&self, t: f64) -> (f64, f64, f64) {
        if self.decay == 0.0 {
            return (1.0, 0.0, 0.0);
        }
        let e = (-self.decay * t).exp();
        (e, -self.decay * e, self.decay * self.decay * e)
    }

    /// Spatial derivatives of the shape: `(S, S_x, S_xx, S_yy, S_xxxx)`.
    fn spatial(&self, x: f64, y: f64) -> Option<[f64; 5]> {
        match &self.shape {
            Shape::Constant => Some([1.0, 0.0, 0.0, 0.0, 0.0]),
            Shape::Affine { c0, bx, by } => Some([c0 + bx * x + by * y, *bx, 0.0, 0.0, 0.0]),
            Shape::Cosine { modes, origin, length } => {
                let mut acc = [0.0; 5];
                for m in modes {
                    let kx = m.p as f64 * PI / length;
                    let ky = m.q as f64 * PI / length;
                    let (sx, cx) = (kx * (x - origin)).sin_cos();
                    let cy = (ky * (y - origin)).cos();
                    acc[0] += m.coef * cx * cy;
                    acc[1] -= m.coef * kx * sx * cy;
                    acc[2] -= m.coef * kx * kx * cx * cy;
                    acc[3] -= m.coef * ky * ky * cx * cy;
                    acc[4] += m.coef * kx.powi(4) * cx * cy;
                }
                Some(acc)
            }
            Shape::Custom { .. } => None,
        }
    }

    pub fn jet(&self, x: f64, y: f64, t: f64) -> Result<Jet> {
        let [s, sx, sxx, syy, sxxxx] = self
            .spatial(x, y)
            .ok_or_else(|| Error::ProfileIncomplete(self.name.clone()))?;
        let (tf, dt, dtt) = self.time_factor(t);
        let a = self.amplitude;
        Ok(Jet {
            u: a * s * tf,
            u_x: a * sx * tf,
            u_xx: a * sxx * tf,
            u_yy: a * syy * tf,
            u_xxxx: a * sxxxx * tf,
            u_t: a * s * dt,
            u_tt: a * s * dtt,
        })
    }

    pub fn u(&self, x: f64, y: f64, t: f64) -> f64 {
        match &self.shape {
            Shape::Custom { u0, .. } => self.amplitude * u0(x, y),
            _ => self.amplitude * self.spatial(x, y).map_or(0.0, |d| d[0]) * self.time_factor(t).0,
        }
    }

    /// Initial velocity `∂u/∂t` at `t`.
    pub fn phi(&self, x: f64, y: f64, t: f64) -> f64 {
        match &self.shape {
            Shape::Custom { phi, .. } => phi.as_ref().map_or(0.0, |f| self.amplitude * f(x, y)),
            _ => self.amplitude * self.spatial(x, y).map_or(0.0, |d| d[0]) * self.time_factor(t).1,
        }
    }

    /// A randomized member of the same family. Cosine profiles get fresh
    /// mode numbers in `0..=3` and coefficients in `[-1, 1]`; other shapes
    /// only get a random sign.
    pub fn variant<R: Rng + ?Sized>(&self, rng: &mut R) -> Profile {
        let mut out = self.clone();
        match &mut out.shape {
            Shape::Cosine { modes, .. } => {
                let count = modes.len().max(1);
                *modes = (0..count)
                    .map(|_| Mode {
                        p: rng.random_range(0..=3),
                        q: rng.random_range(0..=3),
                        coef: rng.random_range(-1.0..=1.0),
                    })
                    .collect();
            }
            _ => {
                if rng.random_bool(0.5) {
                    out.amplitude = -out.amplitude;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cosine_neumann_and_jet() {
        let p = Profile::cosine(0.0, 1.0, 2.0).with_decay(1.0);
        for &s in &[0.0, 0.3, 1.0] {
            assert!(p.jet(0.0, s, 0.5).unwrap().u_x.abs() < 1e-14);
            assert!(p.jet(1.0, s, 0.5).unwrap().u_x.abs() < 1e-14);
        }
        let j = p.jet(0.2, 0.7, 0.5).unwrap();
        let base = 2.0 * (PI * 0.2).cos() * (PI * 0.7).cos() * (-0.5f64).exp();
        assert_relative_eq!(j.u, base, max_relative = 1e-14);
        assert_relative_eq!(j.u_xx, -PI * PI * base, max_relative = 1e-13);
        assert_relative_eq!(j.u_yy, -PI * PI * base, max_relative = 1e-13);
        assert_relative_eq!(j.u_xxxx, PI.powi(4) * base, max_relative = 1e-13);
        assert_relative_eq!(j.u_t, -base, max_relative = 1e-14);
        assert_relative_eq!(j.u_tt, base, max_relative = 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = Profile::cosine_modes(
            -1.0,
            1.0,
            0.7,
            vec![Mode { p: 2, q: 1, coef: 0.4 }, Mode { p: 1, q: 3, coef: -1.1 }],
        )
        .with_decay(0.3);
        let (x, y, t) = (0.13, -0.41, 0.2);
        let e = 1e-3;
        let u = |x: f64, y: f64, t: f64| p.u(x, y, t);
        let j = p.jet(x, y, t).unwrap();
        let fd_x = (u(x + e, y, t) - u(x - e, y, t)) / (2.0 * e);
        let fd_xx = (u(x + e, y, t) - 2.0 * u(x, y, t) + u(x - e, y, t)) / (e * e);
        let fd_yy = (u(x, y + e, t) - 2.0 * u(x, y, t) + u(x, y - e, t)) / (e * e);
        let fd_t = (u(x, y, t + e) - u(x, y, t - e)) / (2.0 * e);
        assert_relative_eq!(j.u_x, fd_x, epsilon = 1e-5);
        assert_relative_eq!(j.u_xx, fd_xx, epsilon = 1e-4);
        assert_relative_eq!(j.u_yy, fd_yy, epsilon = 1e-4);
        assert_relative_eq!(j.u_t, fd_t, epsilon = 1e-6);
    }

    #[test]
    fn custom_has_no_jet() {
        let p = Profile::custom("bump", Arc::new(|x, y| x * y), None);
        assert!(matches!(p.jet(0.0, 0.0, 0.0), Err(Error::ProfileIncomplete(_))));
        assert_eq!(p.u(2.0, 3.0, 0.0), 6.0);
        assert_eq!(p.phi(2.0, 3.0, 0.0), 0.0);
    }

    #[test]
    fn constant_and_affine() {
        let c = Profile::constant(0.3);
        assert_eq!(c.u(0.4, 0.1, 9.0), 0.3);
        assert_eq!(c.jet(0.4, 0.1, 9.0).unwrap().wave_residual(), 0.0);
        let a = Profile::affine(1.0, 2.0, -1.0);
        let j = a.jet(0.5, 0.5, 0.0).unwrap();
        assert_eq!(j.u, 1.5);
        // v = u², v_xx = 2 bx²
        assert_eq!(j.v_xx(), 8.0);
        assert!(!a.is_neumann_compatible());
    }
}
