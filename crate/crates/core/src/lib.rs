//! Co-simulation kernel for coupled lumped-parameter thermal models.
//!
//! Subdomain solvers are black boxes that exchange interface variables
//! (flux, temperature, mass flow rate, area). Coupling drivers advance them
//! with explicit staggered or implicit fixed-point schemes, synchronize on
//! internal events, and track the interface energy imbalance.

// Range checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod closures;
pub mod coupling;
pub mod harness;
pub mod model;
pub mod solvers;
