//! Explicit staggered coupling: one call per solver per macro step.

use rayon::prelude::*;

use super::{check_order, committed_event, CouplingError, IterationTrace, StepReport};
use crate::model::{DomainId, InterfaceRegistry};
use crate::solvers::{InterfaceMap, Solver, SolverOutcome};

fn publish(registry: &mut InterfaceRegistry, from: DomainId, outputs: &InterfaceMap) -> Result<(), CouplingError> {
    for (&to, b) in outputs {
        registry.set_interface(from, to, *b)?;
    }
    Ok(())
}

/// Advances every solver once over `[t_n, t_n + dt]`.
///
/// With `jacobi` unset, solvers run in `order` and each one reads the
/// interface values already published in this step by its predecessors.
/// With `jacobi` set, all solvers read start-of-step values and run in
/// parallel. Events become effective at the end of the step.
pub fn ecs_step<S: Solver>(
    solvers: &mut [S],
    registry: &mut InterfaceRegistry,
    t_n: f64,
    dt: f64,
    order: &[DomainId],
    jacobi: bool,
) -> Result<StepReport, CouplingError> {
    let idx = check_order(solvers, order)?;
    let t_next = t_n + dt;
    let outcomes: Vec<(usize, SolverOutcome)> = if jacobi {
        let inputs: Vec<InterfaceMap> = solvers.iter().map(|s| registry.inputs_of(s.id())).collect();
        let results: Vec<Result<SolverOutcome, CouplingError>> = solvers
            .par_iter_mut()
            .zip(inputs.par_iter())
            .map(|(s, inp)| {
                s.advance(t_n, t_next, inp)
                    .map_err(|source| CouplingError::Solver { id: s.id(), source })
            })
            .collect();
        let mut out = Vec::with_capacity(results.len());
        for (i, r) in results.into_iter().enumerate() {
            out.push((i, r?));
        }
        for (i, o) in &out {
            publish(registry, solvers[*i].id(), &o.outputs)?;
        }
        out
    } else {
        let mut out = Vec::with_capacity(idx.len());
        for &i in &idx {
            let s = &mut solvers[i];
            let inputs = registry.inputs_of(s.id());
            let o = s
                .advance(t_n, t_next, &inputs)
                .map_err(|source| CouplingError::Solver { id: s.id(), source })?;
            publish(registry, s.id(), &o.outputs)?;
            out.push((i, o));
        }
        out
    };

    let mut trace = IterationTrace {
        iterations: 1,
        advances: outcomes.len(),
        ..Default::default()
    };
    for (i, o) in &outcomes {
        let s = &mut solvers[*i];
        if let Some(ev) = &o.event {
            trace.events.push(committed_event(s.id(), ev, t_next));
        }
        s.commit(true).map_err(|source| CouplingError::Solver { id: s.id(), source })?;
    }
    Ok(StepReport { t_next, trace })
}
