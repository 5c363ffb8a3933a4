//! Time loop driving one scenario to its end.

use serde::Serialize;

use super::scenario::{ModelSpec, Scenario};
use super::HarnessError;
use crate::analysis::{e_star, energy_update, envelope_ratio, EnergyLedger, Timestamps};
use crate::coupling::{ecs_step, sync_step, CommittedEvent, IterationRecord, Scheme, StepReport};
use crate::model::InterfaceRegistry;
use crate::solvers::{Phase, Solver, StateTransition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "T21")]
    pub t21: f64,
    pub phi12: f64,
    pub m2: f64,
    pub state2: Phase,
    pub iters: usize,
    #[serde(skip)]
    pub m1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub scheme: Scheme,
    pub dt: f64,
    pub hbar: f64,
    pub steps: usize,
    pub iterations: usize,
    pub advances: usize,
    pub t_final: f64,
    pub stationary: bool,
    pub t_hm: Option<f64>,
    pub t_me: Option<f64>,
    pub m1_final: f64,
    pub t1_final: f64,
    pub m2_final: f64,
    pub t2_final: f64,
    pub max_abs_phi12: f64,
    pub e_star: Option<f64>,
    pub peak_eps_local: Option<f64>,
    pub peak_eps_global: Option<f64>,
    /// Growth factor of the `phi12` oscillation, when it oscillates.
    pub envelope_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub series: Vec<SeriesRow>,
    pub events: Vec<CommittedEvent>,
    pub ledger: Option<EnergyLedger>,
    pub trace: Vec<IterationRecord>,
    pub summary: Summary,
}

struct Loop<'a> {
    scn: &'a Scenario,
    solvers: Vec<Box<dyn Solver>>,
    registry: InterfaceRegistry,
    series: Vec<SeriesRow>,
    events: Vec<CommittedEvent>,
    ledger: Option<EnergyLedger>,
    trace: Vec<IterationRecord>,
    iterations: usize,
    advances: usize,
    stationary: bool,
}

impl Loop<'_> {
    fn row(&self, t: f64, iters: usize) -> Result<SeriesRow, HarnessError> {
        let (id1, id2) = (self.solvers[0].id(), self.solvers[1].id());
        let (s1, s2) = (self.solvers[0].state(), self.solvers[1].state());
        Ok(SeriesRow {
            t,
            t1: s1.temperature,
            t2: s2.temperature,
            t21: self.registry.project(id2, id1)?.temperature,
            phi12: self.registry.project(id1, id2)?.flux,
            m2: s2.mass,
            state2: self.solvers[1].phase(),
            iters,
            m1: s1.mass,
        })
    }

    fn first_event(&self, transition: StateTransition) -> Option<f64> {
        self.events.iter().find(|e| e.transition == transition).map(|e| e.time)
    }

    fn report(self) -> RunReport {
        let last = *self.series.last().expect("initial row is always present");
        let phi: Vec<f64> = self.series.iter().map(|r| r.phi12).collect();
        let summary = Summary {
            name: self.scn.name.clone(),
            scheme: self.scn.coupling.scheme,
            dt: self.scn.coupling.macro_step,
            hbar: self.scn.hbar(),
            steps: self.series.len() - 1,
            iterations: self.iterations,
            advances: self.advances,
            t_final: last.t,
            stationary: self.stationary,
            t_hm: self.first_event(StateTransition::MELT),
            t_me: self.first_event(StateTransition::EMPTY),
            m1_final: last.m1,
            t1_final: last.t1,
            m2_final: last.m2,
            t2_final: last.t2,
            max_abs_phi12: phi.iter().fold(0.0, |a, p| a.max(p.abs())),
            e_star: self.ledger.as_ref().map(EnergyLedger::e_star),
            peak_eps_local: self.ledger.as_ref().map(EnergyLedger::peak_local),
            peak_eps_global: self.ledger.as_ref().map(EnergyLedger::peak_global),
            envelope_ratio: envelope_ratio(&phi),
        };
        RunReport {
            series: self.series,
            events: self.events,
            ledger: self.ledger,
            trace: self.trace,
            summary,
        }
    }
}

/// Energy scale of the melting domain, when it can melt.
fn reference_energy(scn: &Scenario) -> Option<(f64, f64, f64)> {
    let d2 = scn.domain2();
    d2.thresholds.as_ref()?;
    let ModelSpec::Lumped(c) = &d2.model else {
        return None;
    };
    let m = c.material;
    let e = e_star(
        d2.initial_state().mass,
        m.heat_capacity,
        m.fusion_temperature,
        d2.temperature,
        m.fusion_enthalpy,
    );
    (e > 0.0).then_some((e, c.geometry.area, m.fusion_enthalpy))
}

/// Runs `scn` until `t_end` or until domain 1 is stationary.
pub fn run(scn: &Scenario) -> Result<RunReport, HarnessError> {
    scn.validate()?;
    let solvers = scn.build_solvers()?;
    let registry = scn.initial_registry(&solvers)?;
    let energy = reference_energy(scn);
    let mut lp = Loop {
        scn,
        solvers,
        registry,
        series: Vec::new(),
        events: Vec::new(),
        ledger: energy.map(|(e, a, _)| EnergyLedger::new(e, a)),
        trace: Vec::new(),
        iterations: 0,
        advances: 0,
        stationary: false,
    };
    let first = lp.row(0.0, 0)?;
    lp.series.push(first);

    let cfg = &scn.coupling;
    let dt = cfg.macro_step;
    let t_end = scn.end.t_end;
    let (id1, id2) = (lp.solvers[0].id(), lp.solvers[1].id());
    let mut t = 0.0;
    let mut step = 0;
    let mut quiet = 0;
    while t < t_end - 1e-9 * dt {
        let h = dt.min(t_end - t);
        let res: Result<StepReport, _> = match cfg.scheme {
            Scheme::Ecs => ecs_step(&mut lp.solvers, &mut lp.registry, t, h, cfg.explicit_order(), false),
            Scheme::EcsJacobi => ecs_step(&mut lp.solvers, &mut lp.registry, t, h, cfg.explicit_order(), true),
            Scheme::Ics => sync_step(&mut lp.solvers, &mut lp.registry, t, h, cfg, step),
        };
        let rep = match res {
            Ok(r) => r,
            Err(source) => {
                if let crate::coupling::CouplingError::NonConvergence { trace, .. } = &source {
                    lp.trace.extend(trace.records.iter().cloned());
                }
                return Err(HarnessError::Coupling {
                    step,
                    t,
                    source,
                    partial: Box::new(lp.report()),
                });
            }
        };
        let t_next = rep.t_next;
        lp.iterations += rep.trace.iterations;
        lp.advances += rep.trace.advances;
        lp.events.extend(rep.trace.events.iter().copied());
        lp.trace.extend(rep.trace.records);

        if let (Some(ledger), Some((_, _, dh))) = (lp.ledger.as_mut(), energy) {
            let b12 = lp.registry.project(id1, id2)?;
            let b21 = lp.registry.project(id2, id1)?;
            // Under the staggered scheme the side called first acts on data from t_n.
            let (s1, s2) = match cfg.scheme {
                Scheme::Ics => (t_next, t_next),
                Scheme::EcsJacobi => (t, t),
                Scheme::Ecs if cfg.explicit_order()[0] == id1 => (t, t_next),
                Scheme::Ecs => (t_next, t),
            };
            energy_update(
                ledger,
                cfg.scheme,
                b12.flux,
                b21.flux,
                b21.mass_flow,
                dh,
                t_next - t,
                Timestamps {
                    step,
                    t: t_next,
                    t_side1: s1,
                    t_side2: s2,
                },
            );
        }

        let prev_t1 = lp.series.last().expect("non-empty").t1;
        let row = lp.row(t_next, rep.trace.iterations)?;
        lp.series.push(row);
        step += 1;
        if let Some(st) = scn.end.stationarity {
            let rate = (row.t1 - prev_t1).abs() / (t_next - t);
            quiet = if rate < st.threshold { quiet + 1 } else { 0 };
            if quiet >= st.window {
                lp.stationary = true;
                break;
            }
        }
        t = t_next;
    }
    Ok(lp.report())
}
