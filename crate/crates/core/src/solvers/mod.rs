//! Black-box time-advancing solvers and their common contract.
//!
//! A solver integrates its private state from the last committed snapshot
//! over `[t_start, t_end]`, consuming only the interface variables entering
//! it and producing the ones leaving it. The coupling driver decides when a
//! result becomes permanent through [`Solver::commit`].

mod events;
mod lumped;
mod oned;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closures::ClosureError;
use crate::model::{Component, DomainId, InterfaceVariables, ModelError, SubdomainState};

pub use events::{locate_crossing, Crossing};
pub use lumped::{
    advance_empty, advance_heating, advance_melting, Continuity, LumpedConfig, LumpedSolver, StepResult,
};
pub use oned::{advance_1d_reference, profile_mean, OneDConfig, OneDSolver};

/// Configuration of a lumped solver.
pub type SolverConfig = LumpedConfig;

/// Interface variables keyed by the neighbor on the other side.
pub type InterfaceMap = BTreeMap<DomainId, InterfaceVariables>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("missing input from domain {0}")]
    MissingInput(DomainId),
    #[error("nothing to commit: advance was not called since the last commit")]
    NothingPending,
}

/// Which interface quantity a solver has imposed on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Reads the face temperature, returns the flux.
    Dirichlet,
    /// Reads the flux, returns the face temperature.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integration {
    #[default]
    ImplicitEuler,
    ExplicitEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Heating,
    Melting,
    Empty,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Heating => "Heating",
            Phase::Melting => "Melting",
            Phase::Empty => "Empty",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Guard {
    /// Face temperature reached the melt trigger.
    MeltTrigger,
    /// Net melting rate turned negative.
    Refreeze,
    /// Mass reached the residual threshold.
    ResidualMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateTransition {
    pub from: Phase,
    pub to: Phase,
    pub guard: Guard,
}

impl StateTransition {
    pub const MELT: Self = Self {
        from: Phase::Heating,
        to: Phase::Melting,
        guard: Guard::MeltTrigger,
    };
    pub const REFREEZE: Self = Self {
        from: Phase::Melting,
        to: Phase::Heating,
        guard: Guard::Refreeze,
    };
    pub const EMPTY: Self = Self {
        from: Phase::Melting,
        to: Phase::Empty,
        guard: Guard::ResidualMass,
    };
}

impl fmt::Display for StateTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub transition: StateTransition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub melt_trigger: f64,
    pub residual_mass: f64,
}

impl ThresholdParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        crate::model::check_positive("melt_trigger", self.melt_trigger)?;
        crate::model::check_non_negative("residual_mass", self.residual_mass)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    /// Interface variables leaving the solver, keyed by neighbor.
    pub outputs: InterfaceMap,
    pub new_state: SubdomainState,
    pub event: Option<Event>,
    /// Time actually reached: the requested end, or the event time.
    pub t_end: f64,
}

/// Contract every coupled solver fulfils.
pub trait Solver: Send {
    fn id(&self) -> DomainId;

    fn phase(&self) -> Phase;

    /// Last committed state.
    fn state(&self) -> SubdomainState;

    /// Interface variables this solver publishes before any step.
    fn initial_outputs(&self) -> InterfaceMap;

    /// Components of `b_ij` that neighbor `j` actually consumes.
    fn exports(&self, neighbor: DomainId) -> Vec<Component>;

    /// Integrates from the committed snapshot over `[t_start, t_end]`.
    ///
    /// Never changes the committed snapshot; the result is kept as pending.
    fn advance(&mut self, t_start: f64, t_end: f64, inputs: &InterfaceMap) -> Result<SolverOutcome, SolverError>;

    /// Makes the last pending result permanent. The pending event, if any,
    /// switches the phase only when `apply_event` is set.
    fn commit(&mut self, apply_event: bool) -> Result<(), SolverError>;
}

impl<S: Solver + ?Sized> Solver for Box<S> {
    fn id(&self) -> DomainId {
        (**self).id()
    }
    fn phase(&self) -> Phase {
        (**self).phase()
    }
    fn state(&self) -> SubdomainState {
        (**self).state()
    }
    fn initial_outputs(&self) -> InterfaceMap {
        (**self).initial_outputs()
    }
    fn exports(&self, neighbor: DomainId) -> Vec<Component> {
        (**self).exports(neighbor)
    }
    fn advance(&mut self, t_start: f64, t_end: f64, inputs: &InterfaceMap) -> Result<SolverOutcome, SolverError> {
        (**self).advance(t_start, t_end, inputs)
    }
    fn commit(&mut self, apply_event: bool) -> Result<(), SolverError> {
        (**self).commit(apply_event)
    }
}

/// Dispatches one macro step to the solver's current phase.
///
/// The phase switch itself waits for the coupling driver's commit.
pub fn step_state_machine<S: Solver + ?Sized>(
    solver: &mut S,
    t_start: f64,
    dt: f64,
    inputs: &InterfaceMap,
) -> Result<SolverOutcome, SolverError> {
    solver.advance(t_start, t_start + dt, inputs)
}

/// Micro-step grid over `[t_start, t_end]` with a shortened last step.
///
/// Step `j` spans `[time(j), time(j + 1)]`. Equal arguments give
/// bit-identical grids, which the truncation contract relies on.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MicroGrid {
    t_start: f64,
    t_end: f64,
    micro: f64,
    pub(crate) steps: usize,
}

impl MicroGrid {
    pub(crate) fn new(t_start: f64, t_end: f64, micro: f64) -> Self {
        let mut steps = ((t_end - t_start) / micro).ceil().max(1.0) as usize;
        // Drop a trailing step of round-off length.
        while steps > 1 && t_start + (steps - 1) as f64 * micro >= t_end - 1e-9 * micro {
            steps -= 1;
        }
        Self {
            t_start,
            t_end,
            micro,
            steps,
        }
    }

    pub(crate) fn time(&self, j: usize) -> f64 {
        if j >= self.steps {
            self.t_end
        } else {
            self.t_start + j as f64 * self.micro
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lands_on_end() {
        let g = MicroGrid::new(0.0, 100.0, 30.0);
        assert_eq!(g.steps, 4);
        assert_eq!(g.time(3), 90.0);
        assert_eq!(g.time(4), 100.0);
        let g = MicroGrid::new(0.0, 100.0, 10.0);
        assert_eq!(g.steps, 10);
        let g = MicroGrid::new(5.0, 5.5, 10.0);
        assert_eq!((g.steps, g.time(0), g.time(1)), (1, 5.0, 5.5));
        let g = MicroGrid::new(0.0, 0.3, 0.1);
        assert_eq!(g.steps, 3);
    }
}
