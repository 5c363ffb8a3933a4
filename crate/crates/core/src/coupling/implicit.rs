//! Implicit fixed-point coupling and its event-synchronizing variant.

use super::relaxation::Relaxer;
use super::{check_order, committed_event, CouplingConfig, CouplingError, IterationRecord, IterationTrace, StepReport};
use crate::model::{Component, DomainId, InterfaceRegistry};
use crate::solvers::{Solver, SolverOutcome};

/// Interface slot the fixed point iterates on, with the exchanged components.
struct Anchor {
    from: DomainId,
    to: DomainId,
    components: Vec<Component>,
}

fn anchors<S: Solver>(solvers: &[S], registry: &InterfaceRegistry, first: DomainId) -> Result<Vec<Anchor>, CouplingError> {
    let mut out = Vec::new();
    for j in registry.neighbors(first) {
        let i = super::index_of(solvers, j)?;
        let components = solvers[i].exports(first);
        if !components.is_empty() {
            out.push(Anchor {
                from: j,
                to: first,
                components,
            });
        }
    }
    if out.is_empty() {
        return Err(CouplingError::Config(format!("solver {first} receives no exchanged data")));
    }
    Ok(out)
}

fn gather(registry: &InterfaceRegistry, anchors: &[Anchor]) -> Result<Vec<f64>, CouplingError> {
    let mut v = Vec::new();
    for a in anchors {
        let b = registry.project(a.from, a.to)?;
        v.extend(a.components.iter().map(|&c| b.component(c)));
    }
    Ok(v)
}

fn scatter(registry: &mut InterfaceRegistry, anchors: &[Anchor], values: &[f64]) -> Result<(), CouplingError> {
    let mut it = values.iter();
    for a in anchors {
        let mut b = registry.project(a.from, a.to)?;
        for &c in &a.components {
            b.set_component(c, *it.next().expect("candidate length matches anchors"));
        }
        registry.set_interface(a.from, a.to, b)?;
    }
    Ok(())
}

/// Largest relative residual over the exchanged components; absolute when
/// the candidate component is ~0.
///
/// Components are scaled separately so a small mass flow is not hidden
/// behind a temperature of a few thousand kelvin on the same interface.
fn relative_residual(candidate: &[f64], residual: &[f64], eps_abs_floor: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (b, r) in candidate.iter().zip(residual) {
        let rel = if b.abs() < eps_abs_floor { r.abs() } else { (r / b).abs() };
        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }
    worst
}

struct Pass {
    registry: InterfaceRegistry,
    outcomes: Vec<(usize, SolverOutcome)>,
}

fn run_pass<S: Solver>(
    solvers: &mut [S],
    committed: &InterfaceRegistry,
    idx: &[usize],
    anchors: &[Anchor],
    candidate: &[f64],
    t_n: f64,
    horizon: f64,
) -> Result<Pass, CouplingError> {
    let mut reg = committed.clone();
    scatter(&mut reg, anchors, candidate)?;
    let mut outcomes = Vec::with_capacity(idx.len());
    for &i in idx {
        let s = &mut solvers[i];
        let inputs = reg.inputs_of(s.id());
        let o = s
            .advance(t_n, horizon, &inputs)
            .map_err(|source| CouplingError::Solver { id: s.id(), source })?;
        for (&to, b) in &o.outputs {
            reg.set_interface(s.id(), to, *b)?;
        }
        outcomes.push((i, o));
    }
    Ok(Pass { registry: reg, outcomes })
}

fn implicit_step<S: Solver>(
    solvers: &mut [S],
    registry: &mut InterfaceRegistry,
    t_n: f64,
    dt: f64,
    cfg: &CouplingConfig,
    step: usize,
    synchronize: bool,
) -> Result<StepReport, CouplingError> {
    cfg.validate()?;
    let idx = check_order(solvers, &cfg.order)?;
    let anchors = anchors(solvers, registry, cfg.order[0])?;
    let t_full = t_n + dt;
    let mut candidate = gather(registry, &anchors)?;
    let mut horizon = t_full;
    let mut relax = Relaxer::new(cfg.relaxation);
    let mut trace = IterationTrace::default();
    let mut last_residual = f64::INFINITY;

    for k in 0..cfg.max_iterations {
        let pass = run_pass(solvers, registry, &idx, &anchors, &candidate, t_n, horizon)?;
        trace.iterations += 1;
        trace.advances += pass.outcomes.len();
        let image = gather(&pass.registry, &anchors)?;
        let residual: Vec<f64> = image.iter().zip(&candidate).map(|(m, b)| m - b).collect();
        let rel = relative_residual(&candidate, &residual, 1e-12);
        last_residual = rel;

        let event_time = pass
            .outcomes
            .iter()
            .filter_map(|(_, o)| o.event.map(|e| e.time))
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))));
        let t_tilde = if synchronize { event_time.unwrap_or(t_full) } else { t_full };
        let time_ok = !synchronize || (t_tilde - horizon).abs() / dt < cfg.eps_rel;
        let converged = rel <= cfg.eps_rel;

        let mut record = IterationRecord {
            step,
            k,
            t_candidate: horizon,
            residual_norm: rel,
            omega: None,
            event_time,
            candidate: candidate.clone(),
            residual: residual.clone(),
        };

        if converged && time_ok {
            trace.records.push(record);
            let t_next = t_tilde;
            if !(t_next > t_n && t_next <= t_full) {
                return Err(CouplingError::Invariant(format!(
                    "committed time {t_next} outside ({t_n}, {t_full}]"
                )));
            }
            *registry = pass.registry;
            for (i, o) in &pass.outcomes {
                let s = &mut solvers[*i];
                let apply = match &o.event {
                    Some(ev) if synchronize => (ev.time - t_next).abs() <= cfg.eps_rel * dt,
                    Some(_) => true,
                    None => false,
                };
                if apply {
                    let ev = o.event.as_ref().expect("checked above");
                    trace.events.push(committed_event(s.id(), ev, t_next));
                }
                s.commit(apply).map_err(|source| CouplingError::Solver { id: s.id(), source })?;
            }
            return Ok(StepReport { t_next, trace });
        }

        if !rel.is_finite() || residual.iter().any(|r| !r.is_finite()) {
            trace.records.push(record);
            break;
        }
        let omega = relax.next(&residual);
        record.omega = Some(omega);
        trace.records.push(record);
        for (b, r) in candidate.iter_mut().zip(&residual) {
            *b += omega * r;
        }
        if synchronize {
            horizon = cfg.alpha * t_tilde + (1.0 - cfg.alpha) * horizon;
        }
    }
    Err(CouplingError::NonConvergence {
        iterations: trace.iterations,
        residual: last_residual,
        trace: Box::new(trace),
    })
}

/// Relaxed fixed-point iteration over `[t_n, t_n + dt]`.
///
/// Every pass restarts the solvers from their committed state. States are
/// committed only once the interface residual meets the tolerance; events
/// reported during the step take effect at its end.
pub fn ics_step<S: Solver>(
    solvers: &mut [S],
    registry: &mut InterfaceRegistry,
    t_n: f64,
    dt: f64,
    cfg: &CouplingConfig,
    step: usize,
) -> Result<StepReport, CouplingError> {
    implicit_step(solvers, registry, t_n, dt, cfg, step, false)
}

/// Implicit step that shrinks its horizon onto the earliest solver event.
///
/// Each iteration runs one fixed-point pass over `[t_n, h]`, takes the
/// earliest reported event time (or `t_n + dt`) as `t~`, and commits at `t~`
/// once `|t~ - h| / dt < eps_rel` and the interface residual holds;
/// otherwise `h <- alpha t~ + (1 - alpha) h`.
pub fn sync_step<S: Solver>(
    solvers: &mut [S],
    registry: &mut InterfaceRegistry,
    t_n: f64,
    dt: f64,
    cfg: &CouplingConfig,
    step: usize,
) -> Result<StepReport, CouplingError> {
    implicit_step(solvers, registry, t_n, dt, cfg, step, true)
}
