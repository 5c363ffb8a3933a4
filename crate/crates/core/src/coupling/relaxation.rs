//! Relaxation factors for the interface fixed point.

use serde::{Deserialize, Serialize};

use super::CouplingError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RelaxationStrategy {
    Constant { omega: f64 },
    Secant { omega0: f64 },
    /// Secant update clamped to `(0, omega_max]`.
    Aitken { omega0: f64, omega_max: f64 },
}

impl Default for RelaxationStrategy {
    fn default() -> Self {
        RelaxationStrategy::Constant { omega: 1.0 }
    }
}

impl RelaxationStrategy {
    pub fn validate(&self) -> Result<(), CouplingError> {
        let ok = match *self {
            RelaxationStrategy::Constant { omega } => omega > 0.0 && omega.is_finite(),
            RelaxationStrategy::Secant { omega0 } => omega0 > 0.0 && omega0 <= 1.0,
            RelaxationStrategy::Aitken { omega0, omega_max } => omega0 > 0.0 && omega0 <= 1.0 && omega_max > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CouplingError::Config(format!("invalid relaxation {self:?}")))
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Secant relaxation factor from two successive residuals.
///
/// Falls back to `omega_prev` when the residuals coincide.
pub fn secant_omega(omega_prev: f64, r_k: &[f64], r_km1: &[f64]) -> f64 {
    let diff: Vec<f64> = r_k.iter().zip(r_km1).map(|(a, b)| a - b).collect();
    let den = dot(&diff, &diff);
    if den == 0.0 || !den.is_finite() {
        return omega_prev;
    }
    -omega_prev * dot(&diff, r_km1) / den
}

/// Stateful relaxation factor generator for one macro step.
#[derive(Debug, Clone)]
pub struct Relaxer {
    strategy: RelaxationStrategy,
    omega: Option<f64>,
    previous: Option<Vec<f64>>,
}

impl Relaxer {
    pub fn new(strategy: RelaxationStrategy) -> Self {
        Self {
            strategy,
            omega: None,
            previous: None,
        }
    }

    /// Factor to apply after observing residual `r`.
    pub fn next(&mut self, r: &[f64]) -> f64 {
        let omega = match (self.strategy, self.omega, &self.previous) {
            (RelaxationStrategy::Constant { omega }, _, _) => omega,
            (RelaxationStrategy::Secant { omega0 }, None, _) | (RelaxationStrategy::Aitken { omega0, .. }, None, _) => {
                omega0
            }
            (RelaxationStrategy::Secant { .. }, Some(prev), Some(r_prev)) => secant_omega(prev, r, r_prev),
            (RelaxationStrategy::Aitken { omega_max, .. }, Some(prev), Some(r_prev)) => {
                let w = secant_omega(prev, r, r_prev);
                if w <= 0.0 || !w.is_finite() {
                    prev
                } else {
                    w.min(omega_max)
                }
            }
            (_, Some(prev), None) => prev,
        };
        self.omega = Some(omega);
        self.previous = Some(r.to_vec());
        omega
    }
}
