//! Master algorithms coupling black-box solvers over a macro step.

mod explicit;
mod implicit;
mod relaxation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DomainId, ModelError};
use crate::solvers::{Event, Solver, SolverError, StateTransition};

pub use explicit::ecs_step;
pub use implicit::{ics_step, sync_step};
pub use relaxation::{secant_omega, RelaxationStrategy, Relaxer};

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("solver {id} failed: {source}")]
    Solver {
        id: DomainId,
        #[source]
        source: SolverError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no convergence after {iterations} iterations (last relative residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        trace: Box<IterationTrace>,
    },
    #[error("invalid coupling configuration: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Explicit staggered scheme, each solver sees the freshest data.
    Ecs,
    /// Explicit scheme where every solver sees start-of-step data.
    EcsJacobi,
    /// Implicit fixed-point scheme with event synchronization.
    Ics,
}

fn default_eps() -> f64 {
    1e-4
}

fn default_max_iterations() -> usize {
    100
}

fn default_alpha() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub scheme: Scheme,
    #[serde(rename = "dt")]
    pub macro_step: f64,
    #[serde(default = "default_eps")]
    pub eps_rel: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub relaxation: RelaxationStrategy,
    /// Relaxation of the synchronization horizon.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Call order; the implicit scheme iterates on the data entering the first solver.
    pub order: Vec<DomainId>,
    /// Call order of the explicit schemes when it differs from `order`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecs_order: Option<Vec<DomainId>>,
}

impl CouplingConfig {
    pub fn validate(&self) -> Result<(), CouplingError> {
        let bad = |m: String| Err(CouplingError::Config(m));
        if !(self.macro_step > 0.0 && self.macro_step.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.macro_step));
        }
        if !(self.eps_rel > 0.0) {
            return bad(format!("eps_rel must be > 0, got {}", self.eps_rel));
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be >= 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        self.relaxation.validate()?;
        if self.order.is_empty() {
            return bad("order must list the solvers".into());
        }
        Ok(())
    }

    pub fn explicit_order(&self) -> &[DomainId] {
        self.ecs_order.as_deref().unwrap_or(&self.order)
    }
}

/// One fixed-point iteration of a macro step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub step: usize,
    pub k: usize,
    /// Horizon the solvers integrated to.
    pub t_candidate: f64,
    /// Largest relative residual over the anchor interfaces.
    pub residual_norm: f64,
    /// Relaxation factor applied after this iteration; `None` on the last one.
    pub omega: Option<f64>,
    /// Earliest event reported during this iteration.
    pub event_time: Option<f64>,
    pub candidate: Vec<f64>,
    pub residual: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommittedEvent {
    pub domain: DomainId,
    pub transition: StateTransition,
    /// Time the coupled system switches state.
    pub time: f64,
    /// Time the solver located the guard crossing.
    pub detected: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub iterations: usize,
    pub advances: usize,
    pub events: Vec<CommittedEvent>,
}

impl IterationTrace {
    pub fn append(&mut self, other: IterationTrace) {
        self.records.extend(other.records);
        self.iterations += other.iterations;
        self.advances += other.advances;
        self.events.extend(other.events);
    }
}

/// Outcome of one committed macro step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub t_next: f64,
    pub trace: IterationTrace,
}

pub(crate) fn index_of<S: Solver>(solvers: &[S], id: DomainId) -> Result<usize, CouplingError> {
    solvers
        .iter()
        .position(|s| s.id() == id)
        .ok_or_else(|| CouplingError::Config(format!("order names unknown solver {id}")))
}

pub(crate) fn check_order<S: Solver>(solvers: &[S], order: &[DomainId]) -> Result<Vec<usize>, CouplingError> {
    if order.len() != solvers.len() {
        return Err(CouplingError::Config(format!(
            "order has {} entries for {} solvers",
            order.len(),
            solvers.len()
        )));
    }
    let idx: Vec<usize> = order.iter().map(|&id| index_of(solvers, id)).collect::<Result<_, _>>()?;
    let mut seen = idx.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != idx.len() {
        return Err(CouplingError::Config("order repeats a solver".into()));
    }
    Ok(idx)
}

pub(crate) fn committed_event(domain: DomainId, ev: &Event, time: f64) -> CommittedEvent {
    CommittedEvent {
        domain,
        transition: ev.transition,
        time,
        detected: ev.time,
    }
}

#[cfg(test)]
mod tests;
