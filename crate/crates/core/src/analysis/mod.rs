//! Closed-form stability diagnostics and the interface energy ledger.

mod energy;
mod oscillation;
mod stability;

pub use energy::{e_star, energy_update, EnergyLedger, LedgerRow, Timestamps};
pub use oscillation::{envelope_ratio, extrema};
pub use stability::{ecs_characteristic_roots, hbar_crit, omega_bounds, r12, StabilityInputs};
