//! Verification harness: truncation order, operator-norm bounds, Lyapunov
//! stability probing, self-convergence and the solver cross-check.

mod consistency;
mod convergence;
mod eta;
mod operator_report;
mod oracle;
mod stability;

pub use consistency::{consistency_study, truncation_residual, TruncationResidual};
pub use convergence::convergence_study;
pub use eta::{theoretical_eta, EtaBounds};
pub use operator_report::{operator_report, OperatorReport};
pub use oracle::{oracle_check, OracleCase, OracleReport};
pub use stability::{stability_probe, ProbeRecord, ProbeSettings, StabilityProbeResult};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub cells: usize,
    pub h: f64,
    pub l: f64,
    pub residual_eq1: Option<f64>,
    pub residual_eq2: Option<f64>,
    /// Difference to the previous (coarser) level's solution, on the
    /// coarser nodes.
    pub solution_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub levels: Vec<RefinementLevel>,
    /// `log2` of consecutive ratios, per tracked quantity. `None` marks a
    /// pair where both values are exactly zero (nothing to measure).
    pub observed_orders: Vec<Vec<Option<f64>>>,
    /// Names of the tracked quantities, parallel to the inner vectors.
    pub quantities: Vec<String>,
}

/// Below this a residual or difference counts as exactly zero.
pub const ZERO_FLOOR: f64 = 1e-13;

pub(crate) fn observed_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse <= ZERO_FLOOR && fine <= ZERO_FLOOR {
        None
    } else {
        Some((coarse / fine).log2())
    }
}

pub(crate) fn orders(series: &[f64]) -> Vec<Option<f64>> {
    series.windows(2).map(|w| observed_order(w[0], w[1])).collect()
}
