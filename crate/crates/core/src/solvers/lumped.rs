//! Lumped-parameter (0D) solver with Heating, Melting and Empty phases.

use serde::{Deserialize, Serialize};

use super::events::locate_crossing;
use super::{
    Event, InterfaceMap, Integration, MicroGrid, Phase, Role, Solver, SolverError, SolverOutcome, StateTransition,
    ThresholdParams,
};
use crate::closures::{conduction_flux, face_temperature_for_flux, stefan_balance};
use crate::model::{
    check_positive, BoundarySpec, Component, DomainId, GeometrySpec, InterfaceVariables, MaterialProps, SubdomainState,
};

/// How an imposed neighbor flux maps onto this domain's own face flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Continuity {
    /// `phi_ij * A_ij = -phi_ji * A_ji`.
    #[default]
    Opposite,
    /// `phi_ij * A_ij = phi_ji * A_ji`.
    Same,
}

impl Continuity {
    pub(crate) fn apply(self, phi_ji: f64, a_ji: f64, a_ij: f64) -> f64 {
        let s = match self {
            Continuity::Opposite => -1.0,
            Continuity::Same => 1.0,
        };
        s * phi_ji * a_ji / a_ij
    }
}

fn no() -> bool {
    false
}

/// Configuration of one lumped solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LumpedConfig {
    pub micro_step: f64,
    #[serde(default)]
    pub integration: Integration,
    pub material: MaterialProps,
    pub geometry: GeometrySpec,
    pub boundary: BoundarySpec,
    /// Include conduction through the external boundary face in the energy balance.
    #[serde(default = "no")]
    pub boundary_conduction: bool,
    #[serde(default)]
    pub continuity: Continuity,
}

impl LumpedConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_positive("micro_step", self.micro_step)?;
        self.material.validate()?;
        self.geometry.validate()?;
        Ok(())
    }

    fn length(&self, mass: f64) -> f64 {
        mass / (self.material.density * self.geometry.area)
    }

    fn conductance(&self, mass: f64) -> f64 {
        self.material.conductivity / self.length(mass)
    }

    fn boundary_conductance(&self, mass: f64) -> f64 {
        if self.boundary_conduction {
            self.conductance(mass)
        } else {
            0.0
        }
    }

    fn sigma_if(&self) -> f64 {
        self.boundary.interface_sign.value()
    }

    fn sigma_b(&self) -> f64 {
        self.boundary.boundary_sign.value()
    }
}

/// Interface quantities a micro step produced.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Snapshot {
    face_temperature: f64,
    /// Outward flux through this domain's interface face.
    flux: f64,
    /// Mass flow leaving through the interface.
    mass_flow: f64,
}

/// Result of one of the `advance_*` operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub new_state: SubdomainState,
    /// Interface variables leaving the domain, averaged over the interval
    /// actually integrated.
    pub output: InterfaceVariables,
    pub event: Option<Event>,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy)]
enum Kernel<'a> {
    Dirichlet {
        cfg: &'a LumpedConfig,
        face_temperature: f64,
        inflow: f64,
    },
    Neumann {
        cfg: &'a LumpedConfig,
        flux: f64,
        residual_power: bool,
    },
    Melting {
        cfg: &'a LumpedConfig,
        incoming: f64,
    },
}

impl Kernel<'_> {
    fn cfg(&self) -> &LumpedConfig {
        match *self {
            Kernel::Dirichlet { cfg, .. } | Kernel::Neumann { cfg, .. } | Kernel::Melting { cfg, .. } => cfg,
        }
    }

    /// Interface quantities at a state without stepping.
    fn eval(&self, s: &SubdomainState, t: f64) -> Snapshot {
        let cfg = self.cfg();
        let tb = cfg.boundary.temperature.value_at(t);
        let k = cfg.conductance(s.mass);
        match *self {
            Kernel::Dirichlet {
                face_temperature,
                inflow,
                ..
            } => Snapshot {
                face_temperature,
                flux: conduction_flux(k, s.temperature, face_temperature, tb),
                mass_flow: -inflow,
            },
            Kernel::Neumann { flux, .. } => Snapshot {
                face_temperature: face_temperature_for_flux(k, s.temperature, tb, flux),
                flux,
                mass_flow: 0.0,
            },
            Kernel::Melting { incoming, .. } => {
                let tf = cfg.material.fusion_temperature;
                let flux = conduction_flux(k, s.temperature, tf, tb);
                Snapshot {
                    face_temperature: tf,
                    flux,
                    mass_flow: (incoming + flux * cfg.geometry.area) / cfg.material.fusion_enthalpy,
                }
            }
        }
    }

    /// One micro step of length `h` from `s` at time `t`. Returns the new
    /// state and the interface quantities the step applied.
    fn step(&self, s: &SubdomainState, t: f64, h: f64) -> (SubdomainState, Snapshot) {
        let cfg = self.cfg();
        let mat = &cfg.material;
        let area = cfg.geometry.area;
        let tb = cfg.boundary.temperature.value_at(t);
        let (sif, sb) = (cfg.sigma_if(), cfg.sigma_b());
        let implicit = cfg.integration == Integration::ImplicitEuler;
        // Energy right-hand side written as alpha * T + beta.
        let advance = |m: f64, alpha: f64, beta: f64| {
            let cap = m * mat.heat_capacity;
            if implicit {
                (cap * s.temperature / h + beta) / (cap / h - alpha)
            } else {
                s.temperature + h * (alpha * s.temperature + beta) / cap
            }
        };
        match *self {
            Kernel::Dirichlet {
                face_temperature: tf,
                inflow,
                ..
            } => {
                let m_new = s.mass + h * inflow;
                let m = if implicit { m_new } else { s.mass };
                let k = cfg.conductance(m);
                let kb = cfg.boundary_conductance(m);
                let alpha = area * 6.0 * (sif * k + sb * kb) - mat.heat_capacity * inflow;
                let beta = area * (sif * k * (-4.0 * tf - 2.0 * tb) + sb * kb * (-4.0 * tb - 2.0 * tf))
                    + m * mat.residual_power
                    + mat.heat_capacity * inflow * tf;
                let t_new = advance(m, alpha, beta);
                let t_flux = if implicit { t_new } else { s.temperature };
                let snap = Snapshot {
                    face_temperature: tf,
                    flux: conduction_flux(k, t_flux, tf, tb),
                    mass_flow: -inflow,
                };
                (SubdomainState { mass: m_new, temperature: t_new }, snap)
            }
            Kernel::Neumann {
                flux, residual_power, ..
            } => {
                let k = cfg.conductance(s.mass);
                let kb = cfg.boundary_conductance(s.mass);
                let q = if residual_power { mat.residual_power } else { 0.0 };
                let alpha = 3.0 * area * sb * kb;
                let beta = area * (sif * flux + sb * kb * (-3.0 * tb + 0.5 * flux / k)) + s.mass * q;
                let t_new = advance(s.mass, alpha, beta);
                let snap = Snapshot {
                    face_temperature: face_temperature_for_flux(k, t_new, tb, flux),
                    flux,
                    mass_flow: 0.0,
                };
                (SubdomainState { mass: s.mass, temperature: t_new }, snap)
            }
            Kernel::Melting { incoming, .. } => {
                let tf = mat.fusion_temperature;
                let k = cfg.conductance(s.mass);
                let kb = cfg.boundary_conductance(s.mass);
                let mdot0 = self.eval(s, t).mass_flow;
                let alpha = area * 6.0 * (sif * k + sb * kb) + mat.heat_capacity * mdot0;
                let beta = area * (sif * k * (-4.0 * tf - 2.0 * tb) + sb * kb * (-4.0 * tb - 2.0 * tf))
                    + s.mass * mat.residual_power
                    - mat.heat_capacity * mdot0 * tf;
                let t_new = advance(s.mass, alpha, beta);
                let t_flux = if implicit { t_new } else { s.temperature };
                let flux = conduction_flux(k, t_flux, tf, tb);
                let mdot = (incoming + flux * area) / mat.fusion_enthalpy;
                let snap = Snapshot {
                    face_temperature: tf,
                    flux,
                    mass_flow: mdot,
                };
                (
                    SubdomainState {
                        mass: s.mass - h * mdot,
                        temperature: t_new,
                    },
                    snap,
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct GuardSpec {
    transition: StateTransition,
    strict: bool,
    value: fn(&SubdomainState, &Snapshot, &ThresholdParams) -> f64,
}

impl GuardSpec {
    fn triggered(&self, g: f64) -> bool {
        if self.strict {
            g > 0.0
        } else {
            g >= 0.0
        }
    }
}

const MELT_GUARD: GuardSpec = GuardSpec {
    transition: StateTransition::MELT,
    strict: false,
    value: |_, snap, th| snap.face_temperature - th.melt_trigger,
};

const EMPTY_GUARD: GuardSpec = GuardSpec {
    transition: StateTransition::EMPTY,
    strict: false,
    value: |s, _, th| th.residual_mass - s.mass,
};

const REFREEZE_GUARD: GuardSpec = GuardSpec {
    transition: StateTransition::REFREEZE,
    strict: true,
    value: |_, snap, _| -snap.mass_flow,
};

/// Integrates `kernel` over `[t_start, t_end]` in micro steps, stopping at the
/// earliest guard crossing.
fn integrate(
    kernel: Kernel<'_>,
    state: SubdomainState,
    t_start: f64,
    t_end: f64,
    guards: &[GuardSpec],
    thresholds: Option<&ThresholdParams>,
) -> Result<StepResult, SolverError> {
    let cfg = kernel.cfg();
    if !(t_end > t_start) {
        return Err(SolverError::Precondition(format!(
            "empty interval [{t_start}, {t_end}]"
        )));
    }
    let grid = MicroGrid::new(t_start, t_end, cfg.micro_step);
    let area = cfg.geometry.area;
    let th = thresholds.copied().unwrap_or(ThresholdParams {
        melt_trigger: f64::INFINITY,
        residual_mass: 0.0,
    });
    let guards: &[GuardSpec] = if thresholds.is_some() { guards } else { &[] };

    let start_snap = kernel.eval(&state, t_start);
    let mut g_prev: Vec<f64> = guards.iter().map(|g| (g.value)(&state, &start_snap, &th)).collect();
    let mut s = state;
    let mut flux_integral = 0.0;
    let mut mass_integral = 0.0;
    let mut temperature_integral = 0.0;
    let mut t_reached = t_end;
    let mut event = None;

    for j in 0..grid.steps {
        let t0 = grid.time(j);
        let t1 = grid.time(j + 1);
        let h = t1 - t0;
        let (mut s_new, mut snap) = kernel.step(&s, t0, h);
        let mut h_used = h;

        let mut earliest: Option<(f64, usize)> = None;
        for (gi, guard) in guards.iter().enumerate() {
            let g1 = (guard.value)(&s_new, &snap, &th);
            if !guard.triggered(g1) {
                continue;
            }
            let delta = if guard.triggered(g_prev[gi]) {
                // Already satisfied when the step began.
                h
            } else {
                let c = locate_crossing(g_prev[gi], g1, h, |v| guard.triggered(v), |d| {
                    let (sd, nd) = kernel.step(&s, t0, d);
                    (guard.value)(&sd, &nd, &th)
                });
                if c.delta >= h * (1.0 - 1e-9) {
                    h
                } else {
                    c.delta
                }
            };
            if earliest.is_none_or(|(d, _)| delta < d) {
                earliest = Some((delta, gi));
            }
        }

        if let Some((delta, gi)) = earliest {
            if delta < h {
                let t_star = t0 + delta;
                h_used = t_star - t0;
                let (sd, nd) = kernel.step(&s, t0, h_used);
                s_new = sd;
                snap = nd;
                t_reached = t_star;
            } else {
                t_reached = t1;
            }
            event = Some(Event {
                time: t_reached,
                transition: guards[gi].transition,
            });
        }

        flux_integral += snap.flux * h_used;
        mass_integral += snap.mass_flow * h_used;
        temperature_integral += snap.face_temperature * h_used;
        for (gi, guard) in guards.iter().enumerate() {
            g_prev[gi] = (guard.value)(&s_new, &snap, &th);
        }
        s = s_new;
        if event.is_some() {
            break;
        }
    }

    if !s.temperature.is_finite() || !s.mass.is_finite() {
        return Err(SolverError::Precondition(format!(
            "integration produced a non-finite state {s:?}"
        )));
    }
    let span = t_reached - t_start;
    Ok(StepResult {
        new_state: s,
        output: InterfaceVariables {
            flux: flux_integral / span,
            temperature: temperature_integral / span,
            mass_flow: mass_integral / span,
            area,
        },
        event,
        t_end: t_reached,
    })
}

fn check_state(state: &SubdomainState) -> Result<(), SolverError> {
    state.validate()?;
    if state.mass <= 0.0 {
        return Err(SolverError::Precondition("lumped solver needs a positive mass".into()));
    }
    Ok(())
}

/// Heating phase: no mass exchange unless the neighbor delivers some.
///
/// A Dirichlet receiver reads the face temperature (and incoming mass flow)
/// and returns the conduction flux; a Neumann receiver reads the flux and
/// returns the face temperature. With `thresholds`, the melt trigger on the
/// face temperature is watched.
pub fn advance_heating(
    state: SubdomainState,
    input: &InterfaceVariables,
    t_start: f64,
    t_end: f64,
    cfg: &LumpedConfig,
    role: Role,
    thresholds: Option<&ThresholdParams>,
) -> Result<StepResult, SolverError> {
    check_state(&state)?;
    input.validate()?;
    let kernel = match role {
        Role::Dirichlet => Kernel::Dirichlet {
            cfg,
            face_temperature: input.temperature,
            inflow: input.mass_flow,
        },
        Role::Neumann => Kernel::Neumann {
            cfg,
            flux: cfg.continuity.apply(input.flux, input.area, cfg.geometry.area),
            residual_power: true,
        },
    };
    integrate(kernel, state, t_start, t_end, &[MELT_GUARD], thresholds)
}

/// Melting phase: face pinned at the fusion temperature, mass leaves through
/// the front at the Stefan rate.
pub fn advance_melting(
    state: SubdomainState,
    input: &InterfaceVariables,
    t_start: f64,
    t_end: f64,
    cfg: &LumpedConfig,
    thresholds: &ThresholdParams,
) -> Result<StepResult, SolverError> {
    check_state(&state)?;
    input.validate()?;
    if state.mass <= thresholds.residual_mass {
        return Err(SolverError::Precondition(format!(
            "melting needs mass above the residual {} kg, got {}",
            thresholds.residual_mass, state.mass
        )));
    }
    // Validates the fusion enthalpy once for the whole interval.
    stefan_balance(0.0, 0.0, 1.0, 1.0, cfg.material.fusion_enthalpy)?;
    let kernel = Kernel::Melting {
        cfg,
        incoming: input.flux * input.area,
    };
    integrate(kernel, state, t_start, t_end, &[EMPTY_GUARD, REFREEZE_GUARD], Some(thresholds))
}

/// Empty phase: inert residue conducting through a fixed interface.
pub fn advance_empty(
    state: SubdomainState,
    input: &InterfaceVariables,
    t_start: f64,
    t_end: f64,
    cfg: &LumpedConfig,
) -> Result<StepResult, SolverError> {
    check_state(&state)?;
    input.validate()?;
    let kernel = Kernel::Neumann {
        cfg,
        flux: cfg.continuity.apply(input.flux, input.area, cfg.geometry.area),
        residual_power: false,
    };
    integrate(kernel, state, t_start, t_end, &[], None)
}

#[derive(Debug, Clone)]
struct Pending {
    state: SubdomainState,
    event: Option<Event>,
}

/// Lumped solver bound to a single interface.
#[derive(Debug, Clone)]
pub struct LumpedSolver {
    id: DomainId,
    neighbor: DomainId,
    role: Role,
    cfg: LumpedConfig,
    thresholds: Option<ThresholdParams>,
    phase: Phase,
    state: SubdomainState,
    pending: Option<Pending>,
}

impl LumpedSolver {
    pub fn new(
        id: DomainId,
        neighbor: DomainId,
        role: Role,
        cfg: LumpedConfig,
        state: SubdomainState,
        thresholds: Option<ThresholdParams>,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        check_state(&state)?;
        if let Some(th) = &thresholds {
            th.validate()?;
            if role != Role::Neumann {
                return Err(SolverError::Config(
                    "a domain with phase changes must receive the flux (neumann role)".into(),
                ));
            }
            if cfg.material.fusion_enthalpy <= 0.0 {
                return Err(SolverError::Config("phase changes need a positive fusion enthalpy".into()));
            }
        }
        Ok(Self {
            id,
            neighbor,
            role,
            cfg,
            thresholds,
            phase: Phase::Heating,
            state,
            pending: None,
        })
    }

    pub fn config(&self) -> &LumpedConfig {
        &self.cfg
    }

    pub fn role(&self) -> Role {
        self.role
    }
}

impl Solver for LumpedSolver {
    fn id(&self) -> DomainId {
        self.id
    }

    fn phase(&self) -> Phase {
        self.phase
    }

    fn state(&self) -> SubdomainState {
        self.state
    }

    fn initial_outputs(&self) -> InterfaceMap {
        let b = InterfaceVariables::new(0.0, self.state.temperature, 0.0, self.cfg.geometry.area);
        InterfaceMap::from([(self.neighbor, b)])
    }

    fn exports(&self, neighbor: DomainId) -> Vec<Component> {
        if neighbor != self.neighbor {
            return Vec::new();
        }
        match self.role {
            Role::Dirichlet => vec![Component::Flux],
            Role::Neumann => vec![Component::Temperature, Component::MassFlow],
        }
    }

    fn advance(&mut self, t_start: f64, t_end: f64, inputs: &InterfaceMap) -> Result<SolverOutcome, SolverError> {
        let input = inputs
            .get(&self.neighbor)
            .ok_or(SolverError::MissingInput(self.neighbor))?;
        let r = match self.phase {
            Phase::Heating => advance_heating(
                self.state,
                input,
                t_start,
                t_end,
                &self.cfg,
                self.role,
                self.thresholds.as_ref(),
            )?,
            Phase::Melting => {
                let th = self.thresholds.as_ref().expect("melting implies thresholds");
                advance_melting(self.state, input, t_start, t_end, &self.cfg, th)?
            }
            Phase::Empty => advance_empty(self.state, input, t_start, t_end, &self.cfg)?,
        };
        self.pending = Some(Pending {
            state: r.new_state,
            event: r.event,
        });
        Ok(SolverOutcome {
            outputs: InterfaceMap::from([(self.neighbor, r.output)]),
            new_state: r.new_state,
            event: r.event,
            t_end: r.t_end,
        })
    }

    fn commit(&mut self, apply_event: bool) -> Result<(), SolverError> {
        let p = self.pending.take().ok_or(SolverError::NothingPending)?;
        self.state = p.state;
        if apply_event {
            if let Some(ev) = p.event {
                self.phase = ev.transition.to;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Schedule, Sign};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_cfg(tb: f64, dt_micro: f64, integration: Integration) -> LumpedConfig {
        LumpedConfig {
            micro_step: dt_micro,
            integration,
            material: MaterialProps {
                density: 1.0,
                heat_capacity: 1.0,
                conductivity: 1.0,
                fusion_enthalpy: 0.0,
                fusion_temperature: 1e9,
                residual_power: 0.0,
            },
            geometry: GeometrySpec::cylinder(1.0, 1.0, 1.0).unwrap(),
            boundary: BoundarySpec::constant(tb),
            boundary_conduction: false,
            continuity: Continuity::Opposite,
        }
    }

    fn iface(flux: f64, t: f64) -> InterfaceVariables {
        InterfaceVariables::new(flux, t, 0.0, 1.0)
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        for integ in [Integration::ImplicitEuler, Integration::ExplicitEuler] {
            let cfg = unit_cfg(2000.0, 0.01, integ);
            let s = SubdomainState::new(1.0, 2000.0).unwrap();
            let r = advance_heating(s, &iface(0.0, 2000.0), 0.0, 0.37, &cfg, Role::Dirichlet, None).unwrap();
            assert!(r.output.flux.abs() < 1e-9);
            assert!((r.new_state.temperature - 2000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn explicit_neumann_with_zero_flux_keeps_temperature() {
        let cfg = unit_cfg(400.0, 1.0, Integration::ExplicitEuler);
        let s = SubdomainState::new(1.0, 2000.0).unwrap();
        let r = advance_heating(s, &iface(0.0, 2000.0), 0.0, 1.0, &cfg, Role::Neumann, None).unwrap();
        assert_eq!(r.new_state.temperature, 2000.0);
    }

    #[test]
    fn implicit_step_matches_hand_solution() {
        // tau = rho c L^2 / lambda = 1, dt / tau = 0.1.
        let cfg = unit_cfg(3000.0, 0.1, Integration::ImplicitEuler);
        let s = SubdomainState::new(1.0, 2000.0).unwrap();
        let r = advance_heating(s, &iface(0.0, 2000.0), 0.0, 0.1, &cfg, Role::Dirichlet, None).unwrap();
        let expect = (2000.0 + 0.1 * (2.0 * 3000.0 + 4.0 * 2000.0)) / (1.0 + 0.6);
        assert_relative_eq!(r.new_state.temperature, expect, max_relative = 1e-15);
        assert_relative_eq!(r.output.flux, 6.0 * expect - 4.0 * 2000.0 - 2.0 * 3000.0, max_relative = 1e-13);
    }

    #[test]
    fn shortened_last_micro_step_lands_on_end() {
        let cfg = unit_cfg(3000.0, 0.3, Integration::ImplicitEuler);
        let s = SubdomainState::new(1.0, 2000.0).unwrap();
        let r = advance_heating(s, &iface(0.0, 2000.0), 0.0, 1.0, &cfg, Role::Dirichlet, None).unwrap();
        assert_eq!(r.t_end, 1.0);
        // Same result as explicitly chaining 0.3, 0.3, 0.3, 0.1.
        let mut t = 2000.0;
        for h in [0.3, 0.3, 0.3, 0.1f64] {
            t = (t + h * (2.0 * 3000.0 + 4.0 * 2000.0)) / (1.0 + 6.0 * h);
        }
        assert_relative_eq!(r.new_state.temperature, t, max_relative = 1e-12);
    }

    fn melt_cfg() -> (LumpedConfig, ThresholdParams) {
        let mut cfg = unit_cfg(2000.0, 0.5, Integration::ImplicitEuler);
        cfg.material = MaterialProps {
            density: 1e4,
            heat_capacity: 500.0,
            conductivity: 2.0,
            fusion_enthalpy: 2e5,
            fusion_temperature: 2100.0,
            residual_power: 0.0,
        };
        cfg.geometry = GeometrySpec::cylinder(1.0, 1e4, 500.0).unwrap();
        (
            cfg,
            ThresholdParams {
                melt_trigger: 2100.0,
                residual_mass: 150.0,
            },
        )
    }

    #[test]
    fn balanced_front_does_not_melt() {
        let (cfg, th) = melt_cfg();
        // Domain at the fusion temperature everywhere: own flux zero.
        let mut c = cfg.clone();
        c.boundary = BoundarySpec::constant(2100.0);
        let s = SubdomainState::new(500.0, 2100.0).unwrap();
        let r = advance_melting(s, &iface(0.0, 2100.0), 0.0, 10.0, &c, &th).unwrap();
        assert_eq!(r.output.mass_flow, 0.0);
        assert_eq!(r.new_state.mass, 500.0);
        assert!(r.event.is_none());
    }

    #[test]
    fn constant_net_power_hits_residual_mass_on_time() {
        let (mut cfg, th) = melt_cfg();
        cfg.boundary = BoundarySpec::constant(2100.0);
        let s = SubdomainState::new(500.0, 2100.0).unwrap();
        // Own flux stays zero at T = T_fus, so the net melt power is the input.
        let p = 1e5;
        let r = advance_melting(s, &iface(p, 2100.0), 0.0, 1000.0, &cfg, &th).unwrap();
        let t_star = (500.0 - 150.0) / (p / 2e5);
        let ev = r.event.expect("event");
        assert_eq!(ev.transition, StateTransition::EMPTY);
        assert!((ev.time - t_star).abs() <= cfg.micro_step);
        assert_relative_eq!(r.new_state.mass, 150.0, max_relative = 1e-9);
    }

    #[test]
    fn refreeze_is_detected() {
        let (cfg, th) = melt_cfg();
        let s = SubdomainState::new(500.0, 2100.0).unwrap();
        // Cold boundary pulls heat out while the input is small.
        let mut c = cfg.clone();
        c.boundary = BoundarySpec::constant(1000.0);
        c.boundary_conduction = true;
        let r = advance_melting(s, &iface(-8e4, 2100.0), 0.0, 100.0, &c, &th).unwrap();
        assert!(r.t_end > 0.5 && r.t_end < 100.0);
        assert_eq!(r.event.unwrap().transition, StateTransition::REFREEZE);
    }

    #[test]
    fn melt_trigger_and_truncation_contract() {
        let mut cfg = unit_cfg(400.0, 0.7, Integration::ImplicitEuler);
        cfg.material.fusion_enthalpy = 1.0;
        let th = ThresholdParams {
            melt_trigger: 2100.0,
            residual_mass: 0.1,
        };
        let s = SubdomainState::new(1.0, 1000.0).unwrap();
        let input = iface(800.0, 1500.0);
        let r = advance_heating(s, &input, 0.0, 10.0, &cfg, Role::Neumann, Some(&th)).unwrap();
        let ev = r.event.expect("crossing");
        assert_eq!(ev.transition, StateTransition::MELT);
        assert!(ev.time > 0.0 && ev.time < 10.0);
        assert!(r.output.temperature >= 2100.0 && r.output.temperature < 2100.0 + 1e-6);
        let again = advance_heating(s, &input, 0.0, ev.time, &cfg, Role::Neumann, Some(&th)).unwrap();
        assert_eq!(again.new_state, r.new_state);
        assert_eq!(again.t_end, ev.time);
    }

    #[test]
    fn empty_never_reports_events_and_keeps_mass() {
        let cfg = unit_cfg(400.0, 0.5, Integration::ImplicitEuler);
        let s = SubdomainState::new(0.5, 2000.0).unwrap();
        let r = advance_empty(s, &iface(-1e4, 2000.0), 0.0, 50.0, &cfg).unwrap();
        assert!(r.event.is_none());
        assert_eq!(r.new_state.mass, 0.5);
        let eq = advance_empty(
            SubdomainState::new(0.5, 400.0).unwrap(),
            &iface(0.0, 400.0),
            0.0,
            5.0,
            &cfg,
        )
        .unwrap();
        assert_eq!(eq.output.temperature, 400.0);
    }

    #[test]
    fn solver_commit_applies_event_only_on_request() {
        let (mut cfg, th) = melt_cfg();
        cfg.boundary = BoundarySpec::constant(2100.0);
        let mut sv = LumpedSolver::new(2, 1, Role::Neumann, cfg, SubdomainState::new(500.0, 2000.0).unwrap(), Some(th))
            .unwrap();
        assert!(sv.commit(true).is_err());
        let inputs = InterfaceMap::from([(1, iface(2e4, 2000.0))]);
        let out = sv.advance(0.0, 1000.0, &inputs).unwrap();
        assert_eq!(out.event.unwrap().transition, StateTransition::MELT);
        sv.commit(false).unwrap();
        assert_eq!(sv.phase(), Phase::Heating);
        sv.advance(out.t_end, 1200.0, &inputs).unwrap();
        sv.commit(true).unwrap();
        assert_eq!(sv.phase(), Phase::Melting);
    }

    #[test]
    fn sign_options_change_the_balance() {
        let mut cfg = unit_cfg(2000.0, 1.0, Integration::ExplicitEuler);
        let s = SubdomainState::new(1.0, 2000.0).unwrap();
        let cool = advance_heating(s, &iface(10.0, 2000.0), 0.0, 1.0, &cfg, Role::Neumann, None).unwrap();
        cfg.boundary.interface_sign = Sign::Heating;
        let heat = advance_heating(s, &iface(10.0, 2000.0), 0.0, 1.0, &cfg, Role::Neumann, None).unwrap();
        assert_eq!(cool.new_state.temperature - 2000.0, 2000.0 - heat.new_state.temperature);
        cfg.continuity = Continuity::Same;
        let same = advance_heating(s, &iface(10.0, 2000.0), 0.0, 1.0, &cfg, Role::Neumann, None).unwrap();
        assert_eq!(same.new_state.temperature, cool.new_state.temperature);
        let _ = Schedule::constant(0.0);
    }

    proptest! {
        #[test]
        fn implicit_relaxes_monotonically(
            t0 in 500.0..4000.0f64, tb in 500.0..4000.0f64, tf in 500.0..4000.0f64,
            h in 1e-3..1e3f64,
        ) {
            let mut cfg = unit_cfg(tb, h, Integration::ImplicitEuler);
            cfg.boundary_conduction = true;
            // Fixed point of m c dT/dt = -phi_if - phi_b with constant faces.
            let t_inf = (tf + tb) / 2.0;
            let mut s = SubdomainState::new(1.0, t0).unwrap();
            let mut err = (t0 - t_inf).abs();
            for n in 0..20 {
                let r = advance_heating(s, &iface(0.0, tf), n as f64 * h, (n + 1) as f64 * h, &cfg, Role::Dirichlet, None).unwrap();
                s = r.new_state;
                let e = (s.temperature - t_inf).abs();
                prop_assert!(e <= err * (1.0 + 1e-12) + 1e-9);
                err = e;
            }
        }
    }
}
