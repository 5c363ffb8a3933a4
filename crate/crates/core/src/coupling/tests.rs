use super::*;
use crate::model::{Component, InterfaceRegistry, InterfaceVariables, SubdomainState};
use crate::solvers::{InterfaceMap, Phase, Solver, SolverError, SolverOutcome};

/// Affine black box: exports `gain * input + offset` of one component.
#[derive(Debug, Clone)]
struct Affine {
    id: DomainId,
    neighbor: DomainId,
    reads: Component,
    writes: Component,
    gain: f64,
    offset: f64,
    /// Reports an event at this time when the horizon reaches it.
    event_at: Option<f64>,
    phase: Phase,
    pending: Option<Option<Event>>,
    advances: usize,
    commits: Vec<bool>,
    seen_horizons: Vec<f64>,
}

impl Affine {
    fn new(id: DomainId, neighbor: DomainId, reads: Component, writes: Component, gain: f64, offset: f64) -> Self {
        Self {
            id,
            neighbor,
            reads,
            writes,
            gain,
            offset,
            event_at: None,
            phase: Phase::Heating,
            pending: None,
            advances: 0,
            commits: Vec::new(),
            seen_horizons: Vec::new(),
        }
    }
}

impl Solver for Affine {
    fn id(&self) -> DomainId {
        self.id
    }
    fn phase(&self) -> Phase {
        self.phase
    }
    fn state(&self) -> SubdomainState {
        SubdomainState::new(1.0, 1.0).unwrap()
    }
    fn initial_outputs(&self) -> InterfaceMap {
        InterfaceMap::from([(self.neighbor, InterfaceVariables::new(0.0, 0.0, 0.0, 1.0))])
    }
    fn exports(&self, neighbor: DomainId) -> Vec<Component> {
        if neighbor == self.neighbor {
            vec![self.writes]
        } else {
            Vec::new()
        }
    }
    fn advance(&mut self, t_start: f64, t_end: f64, inputs: &InterfaceMap) -> Result<SolverOutcome, SolverError> {
        self.advances += 1;
        self.seen_horizons.push(t_end);
        let x = inputs
            .get(&self.neighbor)
            .ok_or(SolverError::MissingInput(self.neighbor))?
            .component(self.reads);
        let mut out = InterfaceVariables::new(0.0, 0.0, 0.0, 1.0);
        out.set_component(self.writes, self.gain * x + self.offset);
        let event = match self.event_at {
            Some(te) if self.phase == Phase::Heating && te > t_start && te <= t_end => Some(Event {
                time: te,
                transition: StateTransition::MELT,
            }),
            _ => None,
        };
        self.pending = Some(event);
        Ok(SolverOutcome {
            outputs: InterfaceMap::from([(self.neighbor, out)]),
            new_state: self.state(),
            event,
            t_end: event.map_or(t_end, |e| e.time),
        })
    }
    fn commit(&mut self, apply_event: bool) -> Result<(), SolverError> {
        let ev = self.pending.take().ok_or(SolverError::NothingPending)?;
        self.commits.push(apply_event);
        if apply_event {
            if let Some(e) = ev {
                self.phase = e.transition.to;
            }
        }
        Ok(())
    }
}

/// Solver 1 maps temperature to flux, solver 2 maps flux to temperature.
fn pair(g1: f64, c1: f64, g2: f64, c2: f64) -> (Vec<Affine>, InterfaceRegistry) {
    let s1 = Affine::new(1, 2, Component::Temperature, Component::Flux, g1, c1);
    let s2 = Affine::new(2, 1, Component::Flux, Component::Temperature, g2, c2);
    let mut reg = InterfaceRegistry::default();
    reg.connect(1, 2, InterfaceVariables::new(0.0, 0.0, 0.0, 1.0), InterfaceVariables::new(0.0, 0.0, 0.0, 1.0))
        .unwrap();
    (vec![s1, s2], reg)
}

fn cfg(scheme: Scheme, omega: f64) -> CouplingConfig {
    CouplingConfig {
        scheme,
        macro_step: 1.0,
        eps_rel: 1e-10,
        max_iterations: 200,
        relaxation: RelaxationStrategy::Constant { omega },
        alpha: 0.5,
        order: vec![1, 2],
        ecs_order: None,
    }
}

fn fixed_point(g1: f64, c1: f64, g2: f64, c2: f64) -> (f64, f64) {
    let t = (g2 * c1 + c2) / (1.0 - g1 * g2);
    (g1 * t + c1, t)
}

#[test]
fn gauss_seidel_uses_fresh_data() {
    let (mut s, mut reg) = pair(2.0, 1.0, 3.0, 0.0);
    let rep = ecs_step(&mut s, &mut reg, 0.0, 1.0, &[1, 2], false).unwrap();
    assert_eq!(rep.t_next, 1.0);
    // Solver 1 sees T = 0 and emits q = 1; solver 2 sees that q.
    assert_eq!(reg.project(1, 2).unwrap().flux, 1.0);
    assert_eq!(reg.project(2, 1).unwrap().temperature, 3.0);
    assert_eq!((s[0].advances, s[1].advances), (1, 1));
    assert_eq!((rep.trace.iterations, rep.trace.advances), (1, 2));
}

#[test]
fn jacobi_uses_start_of_step_data() {
    let (mut s, mut reg) = pair(2.0, 1.0, 3.0, 0.5);
    ecs_step(&mut s, &mut reg, 0.0, 1.0, &[1, 2], true).unwrap();
    assert_eq!(reg.project(1, 2).unwrap().flux, 1.0);
    assert_eq!(reg.project(2, 1).unwrap().temperature, 0.5);
}

#[test]
fn explicit_event_is_committed_at_step_end() {
    let (mut s, mut reg) = pair(0.5, 0.0, 0.5, 0.0);
    s[1].event_at = Some(0.3);
    let rep = ecs_step(&mut s, &mut reg, 0.0, 1.0, &[1, 2], false).unwrap();
    assert_eq!(rep.trace.events.len(), 1);
    let ev = rep.trace.events[0];
    assert_eq!((ev.domain, ev.time, ev.detected), (2, 1.0, 0.3));
    assert_eq!(s[1].phase, Phase::Melting);
}

#[test]
fn implicit_converges_to_affine_fixed_point() {
    let (g1, c1, g2, c2) = (0.5, 1.0, -0.8, 2.0);
    let (mut s, mut reg) = pair(g1, c1, g2, c2);
    let rep = ics_step(&mut s, &mut reg, 0.0, 1.0, &cfg(Scheme::Ics, 1.0), 0).unwrap();
    let (q, t) = fixed_point(g1, c1, g2, c2);
    assert!((reg.project(1, 2).unwrap().flux - q).abs() < 1e-9);
    assert!((reg.project(2, 1).unwrap().temperature - t).abs() < 1e-9);
    assert_eq!(rep.trace.advances, 2 * rep.trace.iterations);
    assert_eq!(s[0].commits, vec![false]);
    // Every pass restarts from the same committed time.
    assert!(s[0].seen_horizons.iter().all(|&h| h == 1.0));
}

#[test]
fn fixed_point_already_met_takes_one_iteration() {
    let (g1, c1, g2, c2) = (0.5, 1.0, -0.8, 2.0);
    let (mut s, mut reg) = pair(g1, c1, g2, c2);
    let (_, t) = fixed_point(g1, c1, g2, c2);
    let mut b = reg.project(2, 1).unwrap();
    b.temperature = t;
    reg.set_interface(2, 1, b).unwrap();
    let rep = ics_step(&mut s, &mut reg, 0.0, 1.0, &cfg(Scheme::Ics, 1.0), 0).unwrap();
    assert_eq!(rep.trace.iterations, 1);
}

#[test]
fn relaxation_rescues_a_divergent_map() {
    // Loop gain -1.5: plain substitution diverges, omega = 1 / 2.5 is exact.
    let (g1, c1, g2, c2) = (1.5, 1.0, -1.0, 2.0);
    let (mut s, mut reg) = pair(g1, c1, g2, c2);
    let mut c = cfg(Scheme::Ics, 1.0);
    c.max_iterations = 30;
    let err = ics_step(&mut s.clone(), &mut reg.clone(), 0.0, 1.0, &c, 0).unwrap_err();
    assert!(matches!(err, CouplingError::NonConvergence { .. }));
    c.relaxation = RelaxationStrategy::Constant { omega: 0.4 };
    let rep = ics_step(&mut s, &mut reg, 0.0, 1.0, &c, 0).unwrap();
    assert!(rep.trace.iterations <= 3);
    let (_, t) = fixed_point(g1, c1, g2, c2);
    assert!((reg.project(2, 1).unwrap().temperature - t).abs() < 1e-9);
}

#[test]
fn non_convergence_leaves_state_uncommitted() {
    let (mut s, mut reg) = pair(1.5, 1.0, -1.0, 2.0);
    let before = reg.clone();
    let mut c = cfg(Scheme::Ics, 1.0);
    c.max_iterations = 5;
    match ics_step(&mut s, &mut reg, 0.0, 1.0, &c, 0) {
        Err(CouplingError::NonConvergence { iterations, trace, .. }) => {
            assert_eq!(iterations, 5);
            assert_eq!(trace.records.len(), 5);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
    assert_eq!(reg, before);
    assert!(s[0].commits.is_empty());
}

#[test]
fn secant_relaxation_converges_fast_on_affine_map() {
    let (g1, c1, g2, c2) = (1.5, 1.0, -1.0, 2.0);
    let (mut s, mut reg) = pair(g1, c1, g2, c2);
    let mut c = cfg(Scheme::Ics, 1.0);
    c.relaxation = RelaxationStrategy::Secant { omega0: 0.5 };
    let rep = ics_step(&mut s, &mut reg, 0.0, 1.0, &c, 0).unwrap();
    assert!(rep.trace.iterations <= 4, "{} iterations", rep.trace.iterations);
}

#[test]
fn sync_without_events_matches_plain_implicit() {
    let (mut a, mut ra) = pair(0.5, 1.0, -0.8, 2.0);
    let (mut b, mut rb) = pair(0.5, 1.0, -0.8, 2.0);
    let c = cfg(Scheme::Ics, 0.7);
    let x = ics_step(&mut a, &mut ra, 0.0, 1.0, &c, 0).unwrap();
    let y = sync_step(&mut b, &mut rb, 0.0, 1.0, &c, 0).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(x.t_next, y.t_next);
    assert_eq!(x.trace.records, y.trace.records);
}

#[test]
fn sync_lands_on_the_event() {
    let (mut s, mut reg) = pair(0.5, 1.0, -0.8, 2.0);
    s[1].event_at = Some(0.37);
    let mut c = cfg(Scheme::Ics, 1.0);
    c.eps_rel = 1e-6;
    let rep = sync_step(&mut s, &mut reg, 0.0, 1.0, &c, 0).unwrap();
    assert_eq!(rep.t_next, 0.37);
    assert_eq!(rep.trace.events.len(), 1);
    assert_eq!(rep.trace.events[0].time, 0.37);
    assert_eq!(s[1].phase, Phase::Melting);
    assert_eq!(s[0].phase, Phase::Heating);
    // Horizons contract geometrically onto the event.
    let h = &s[0].seen_horizons;
    assert_eq!(h[0], 1.0);
    assert!(h.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn explicit_is_deterministic() {
    let run = || {
        let (mut s, mut reg) = pair(0.3, 1.0, 0.7, -2.0);
        for n in 0..20 {
            ecs_step(&mut s, &mut reg, n as f64, 1.0, &[2, 1], true).unwrap();
        }
        reg
    };
    assert_eq!(run(), run());
}

#[test]
fn bad_order_is_rejected() {
    let (mut s, mut reg) = pair(0.3, 1.0, 0.7, -2.0);
    assert!(matches!(
        ecs_step(&mut s, &mut reg, 0.0, 1.0, &[1, 1], false),
        Err(CouplingError::Config(_))
    ));
    assert!(matches!(
        ecs_step(&mut s, &mut reg, 0.0, 1.0, &[1, 3], false),
        Err(CouplingError::Config(_))
    ));
}
