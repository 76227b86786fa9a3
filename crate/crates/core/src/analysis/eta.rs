//! Closed-form admissible radii from the stability argument.
//!
//! Each radius is the positive root of a quadratic `a x² + b x + c` with
//! `a, b > 0` and `c < 0`, evaluated as `−2c / (b + √(b² − 4ac))` to avoid
//! cancellation when `c` is small.

use serde::{Deserialize, Serialize};

use crate::operators::CoefficientSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    /// Quadratic evaluated at `value`.
    pub residual: f64,
    /// False when the quadratic has no positive root (the admissible
    /// interval is empty and `value` is 0).
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaBounds {
    pub epsilon: f64,
    /// Radius for `U¹`: root of `8η² + (19 + 8l‖φ‖)η + 3l‖φ‖ + 4l²‖φ‖² − ε`.
    pub eta1: Root,
    /// Radius for `V¹`: root of `Aη² + (B + 16|c2|)η + C − ε`.
    pub eta1_prime: Root,
    /// `min(η₁, η₁′)`.
    pub eta0: f64,
    /// Induction radius for `U^{n+1}`: root of `8ε₁² + 19ε₁ − ε`.
    pub eps1: Root,
    /// Induction radius for `V^{n+1}`:
    /// root of `(32|c2| + 2)ε₁² + (4|c1| + 80|c2| + 1)ε₁ − ε`.
    pub eps1_prime: Root,
}

fn positive_root(a: f64, b: f64, c: f64) -> Root {
    let disc = b * b - 4.0 * a * c;
    if !(c < 0.0) || disc < 0.0 {
        return Root {
            value: 0.0,
            residual: c,
            admissible: false,
        };
    }
    let value = -2.0 * c / (b + disc.sqrt());
    Root {
        value,
        residual: (a * value + b) * value + c,
        admissible: true,
    }
}

pub fn theoretical_eta(epsilon: f64, l: f64, phi_norm: f64, coeffs: &CoefficientSet, h: f64) -> EtaBounds {
    let lp = l * phi_norm;
    let (c1, c2) = (coeffs.c1.abs(), coeffs.c2.abs());
    let inv_h2 = 1.0 / (h * h);

    let eta1 = positive_root(8.0, 19.0 + 8.0 * lp, 3.0 * lp + 4.0 * lp * lp - epsilon);

    let qa = 3.0 + 32.0 * c2;
    let qb = 4.0 * (c1 + 8.0 * c2 * (2.0 + lp) + lp + inv_h2);
    let qc = 2.0 * (1.0 + 8.0 * c2) * lp * lp + 4.0 * l * (4.0 * c2 + inv_h2) * phi_norm;
    let eta1_prime = positive_root(qa, qb + 16.0 * c2, qc - epsilon);

    let eps1 = positive_root(8.0, 19.0, -epsilon);
    let eps1_prime = positive_root(32.0 * c2 + 2.0, 4.0 * c1 + 80.0 * c2 + 1.0, -epsilon);

    EtaBounds {
        epsilon,
        eta1,
        eta1_prime,
        eta0: eta1.value.min(eta1_prime.value),
        eps1,
        eps1_prime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::operators::coefficients;

    #[test]
    fn unit_epsilon_no_velocity() {
        let g = build_grid(0.0, 1.0, 16, 0.25, 1.0, 1.0, 0.0).unwrap();
        let b = theoretical_eta(1.0, 0.0, 0.0, &coefficients(&g), g.h);
        let expected = (393f64.sqrt() - 19.0) / 16.0;
        assert!((b.eta1.value - expected).abs() < 1e-15);
        // 0.0515142..., which agrees with the quoted 0.0515146 to six places
        assert!((b.eta1.value - 0.0515146).abs() < 1e-6);
        assert!(b.eta1.residual.abs() < 1e-12);
        // the induction radius solves the same quadratic when l = 0
        assert!((b.eps1.value - expected).abs() < 1e-15);
        assert!(b.eta1_prime.admissible && b.eta1_prime.residual.abs() < 1e-10);
        assert!(b.eps1_prime.admissible && b.eps1_prime.residual.abs() < 1e-10);
        assert_eq!(b.eta0, b.eta1.value.min(b.eta1_prime.value));
    }

    #[test]
    fn collapses_as_epsilon_vanishes() {
        let g = build_grid(0.0, 1.0, 8, 0.25, 1.0, 1.0, 0.0).unwrap();
        let c = coefficients(&g);
        let mut last = f64::INFINITY;
        for e in [1e-2, 1e-4, 1e-8, 1e-12] {
            let b = theoretical_eta(e, 0.0, 0.0, &c, g.h);
            assert!(b.eta1.value < last);
            last = b.eta1.value;
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn empty_interval_is_flagged() {
        let g = build_grid(0.0, 1.0, 8, 0.25, 1.0, 1.0, 0.0).unwrap();
        // 3 l ‖φ‖ exceeds ε: no positive root
        let b = theoretical_eta(1e-3, 0.1, 1.0, &coefficients(&g), g.h);
        assert!(!b.eta1.admissible);
        assert_eq!(b.eta1.value, 0.0);
    }

    #[test]
    fn grid_term_can_empty_the_velocity_interval() {
        // 4 l φ / h² = 4 h φ with l = h³, which exceeds a small ε
        let g = build_grid(0.0, 1.0, 12, 0.4, 1.0, 1.0, 0.0).unwrap();
        let b = theoretical_eta(0.1, g.l, 2.0, &coefficients(&g), g.h);
        assert!(b.eta1.admissible);
        assert!(!b.eta1_prime.admissible);
        assert_eq!(b.eta0, 0.0);
    }

    #[test]
    fn back_substitution_with_velocity() {
        let g = build_grid(0.0, 1.0, 12, 0.4, 1.0, 1.0, 0.0).unwrap();
        let c = coefficients(&g);
        for e in [0.1, 1.0, 10.0] {
            let b = theoretical_eta(e, g.l, 0.1, &c, g.h);
            for r in [b.eta1, b.eta1_prime, b.eps1, b.eps1_prime] {
                assert!(r.admissible);
                assert!(r.residual.abs() <= 1e-10 * e.max(1.0), "{r:?}");
            }
        }
    }
}
