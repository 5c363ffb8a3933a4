//! Linear stability of the staggered and fixed-point toy couplings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dimensionless description of the two-slab toy problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityInputs {
    /// Conduction time of domain 1, `rho c L^2 / lambda`.
    pub tau1: f64,
    pub tau2: f64,
    /// Conductance ratio `(lambda1 / L1) / (lambda2 / L2)`.
    pub hbar: f64,
    pub dt: f64,
}

impl StabilityInputs {
    fn a(&self) -> f64 {
        self.dt / self.tau1
    }

    fn b(&self) -> f64 {
        self.dt / self.tau2
    }
}

/// Discrete coupling strength; the staggered scheme is stable below 1.
pub fn r12(p: &StabilityInputs) -> f64 {
    (1.0 - 6.0 * p.b()).abs() / (1.0 + 6.0 * p.a()).abs() * p.hbar
}

/// Conductance ratio at which `r12` reaches 1; infinite when `dt = tau2 / 6`.
pub fn hbar_crit(dt: f64, tau1: f64, tau2: f64) -> f64 {
    let den = 1.0 - 6.0 * dt / tau2;
    if den == 0.0 {
        f64::INFINITY
    } else {
        ((1.0 + 6.0 * dt / tau1) / den).abs()
    }
}

/// `(omega_max, omega_opt)` for constant relaxation of the fixed point.
pub fn omega_bounds(p: &StabilityInputs) -> (f64, f64) {
    let r = r12(p);
    (2.0 / (1.0 + r), 1.0 / (1.0 + r))
}

/// Roots of `(1 + 6a) x^2 - (1 + (1 - 6b) hbar) x + hbar = 0`, larger modulus first.
pub fn ecs_characteristic_roots(p: &StabilityInputs) -> (Complex64, Complex64) {
    let qa = 1.0 + 6.0 * p.a();
    let qb = -(1.0 + (1.0 - 6.0 * p.b()) * p.hbar);
    let qc = p.hbar;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 {
        let q = -0.5 * (qb + qb.signum() * disc.sqrt());
        let x1 = q / qa;
        let x2 = if q != 0.0 { qc / q } else { 0.0 };
        let (big, small) = if x1.abs() >= x2.abs() { (x1, x2) } else { (x2, x1) };
        (Complex64::new(big, 0.0), Complex64::new(small, 0.0))
    } else {
        let re = -qb / (2.0 * qa);
        let im = (-disc).sqrt() / (2.0 * qa);
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}
