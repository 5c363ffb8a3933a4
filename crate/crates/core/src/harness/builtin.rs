//! Ready-made scenarios reproducing the reference studies.

use crate::coupling::{CouplingConfig, RelaxationStrategy, Scheme};
use crate::model::{BoundarySpec, GeometrySpec, MaterialProps, Schedule, Sign};
use crate::solvers::{Continuity, Integration, LumpedConfig, OneDConfig, Role, ThresholdParams};

use super::scenario::{DomainSpec, EndCondition, ModelSpec, Scenario, Stationarity};

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 5] = ["events", "stability-ecs", "stability-ics", "lp-physical", "reference-1d"];

pub fn by_name(name: &str) -> Option<Scenario> {
    Some(match name {
        "events" => events(Scheme::Ics, 100.0),
        "stability-ecs" => stability_ecs(1.6),
        "stability-ics" => stability_ics(1.6),
        "lp-physical" => lp_physical(),
        "reference-1d" => reference_1d(),
        _ => return None,
    })
}

fn material(density: f64, heat_capacity: f64, conductivity: f64) -> MaterialProps {
    MaterialProps {
        density,
        heat_capacity,
        conductivity,
        fusion_enthalpy: 0.0,
        fusion_temperature: f64::MAX,
        residual_power: 0.0,
    }
}

fn boundary(schedule: Vec<(f64, f64)>, interface_sign: Sign) -> BoundarySpec {
    BoundarySpec {
        temperature: Schedule::new(schedule).expect("static schedule"),
        boundary_sign: Sign::Cooling,
        interface_sign,
    }
}

fn coupling(scheme: Scheme, dt: f64, relaxation: RelaxationStrategy) -> CouplingConfig {
    CouplingConfig {
        scheme,
        macro_step: dt,
        eps_rel: 1e-4,
        max_iterations: 100,
        relaxation,
        alpha: 0.5,
        order: vec![1, 2],
        ecs_order: Some(vec![2, 1]),
    }
}

/// Toy slabs: `tau1 = 1000 s`, `tau2 = 1e4 s`, 0.1 m thick, 1 m^2.
///
/// Both boundaries jump away from 2000 K at `0+` (domain 1 to 3000 K,
/// domain 2 to 400 K) and return to 2000 K at `t = 3000 s`. One micro step
/// per macro step; domain 1 is implicit, domain 2 explicit.
struct Toy {
    hbar: f64,
    continuity: Continuity,
    interface_sign: Sign,
}

const TOY_LENGTH: f64 = 0.1;
const TOY_DENSITY: f64 = 1e4;
const TOY_K2: f64 = 100.0;
const TOY_TAU1: f64 = 1000.0;
const TOY_TAU2: f64 = 1e4;

fn toy_materials(hbar: f64) -> (MaterialProps, MaterialProps) {
    // tau = rho c L / k with k = lambda / L.
    let k1 = hbar * TOY_K2;
    let c1 = TOY_TAU1 * k1 / (TOY_DENSITY * TOY_LENGTH);
    let c2 = TOY_TAU2 * TOY_K2 / (TOY_DENSITY * TOY_LENGTH);
    (
        material(TOY_DENSITY, c1, k1 * TOY_LENGTH),
        material(TOY_DENSITY, c2, TOY_K2 * TOY_LENGTH),
    )
}

type Points = Vec<(f64, f64)>;

fn toy_schedules() -> (Points, Points) {
    (vec![(0.0, 3000.0), (3000.0, 2000.0)], vec![(0.0, 400.0), (3000.0, 2000.0)])
}

fn toy(name: &str, description: &str, t: Toy, mut c: CouplingConfig) -> Scenario {
    // Slow contraction near the relaxation limit needs room to converge.
    c.max_iterations = 1000;
    let (m1, m2) = toy_materials(t.hbar);
    let (s1, s2) = toy_schedules();
    let geometry = GeometrySpec::cylinder(1.0, TOY_DENSITY, TOY_DENSITY * TOY_LENGTH).expect("static geometry");
    let lumped = |material, schedule, integration, continuity, sign| LumpedConfig {
        micro_step: 1e9,
        integration,
        material,
        geometry,
        boundary: boundary(schedule, sign),
        boundary_conduction: false,
        continuity,
    };
    Scenario {
        name: name.into(),
        description: description.into(),
        coupling: c,
        end: EndCondition {
            t_end: 8000.0,
            stationarity: None,
        },
        domains: vec![
            DomainSpec {
                id: 1,
                neighbor: 2,
                role: Role::Dirichlet,
                temperature: 2000.0,
                thresholds: None,
                model: ModelSpec::Lumped(lumped(
                    m1,
                    s1,
                    Integration::ImplicitEuler,
                    Continuity::Opposite,
                    Sign::Cooling,
                )),
            },
            DomainSpec {
                id: 2,
                neighbor: 1,
                role: Role::Neumann,
                temperature: 2000.0,
                thresholds: None,
                model: ModelSpec::Lumped(lumped(
                    m2,
                    s2,
                    Integration::ExplicitEuler,
                    t.continuity,
                    t.interface_sign,
                )),
            },
        ],
    }
}

/// Staggered toy coupling; neutral at `hbar = 1 + 6 dt / tau1`.
pub fn stability_ecs(hbar: f64) -> Scenario {
    toy(
        "stability-ecs",
        "two slabs, staggered coupling, domain 2 sees the flux with its own sign",
        Toy {
            hbar,
            continuity: Continuity::Same,
            interface_sign: Sign::Heating,
        },
        coupling(Scheme::Ecs, 100.0, RelaxationStrategy::default()),
    )
}

/// Fixed-point toy coupling; plain substitution contracts for `r12 < 1`.
pub fn stability_ics(hbar: f64) -> Scenario {
    toy(
        "stability-ics",
        "two slabs, implicit coupling with constant relaxation",
        Toy {
            hbar,
            continuity: Continuity::Opposite,
            interface_sign: Sign::Heating,
        },
        coupling(Scheme::Ics, 100.0, RelaxationStrategy::default()),
    )
}

/// Toy slabs with physically oriented fluxes, solved with the implicit scheme.
pub fn lp_physical() -> Scenario {
    toy(
        "lp-physical",
        "two lumped slabs with energy-conserving interface signs",
        Toy {
            hbar: 1.6,
            continuity: Continuity::Opposite,
            interface_sign: Sign::Cooling,
        },
        coupling(
            Scheme::Ics,
            100.0,
            RelaxationStrategy::Aitken {
                omega0: 0.5,
                omega_max: 1.0,
            },
        ),
    )
}

/// The toy slabs of [`lp_physical`] resolved by 50-node conduction solvers.
pub fn reference_1d() -> Scenario {
    let mut s = lp_physical();
    s.name = "reference-1d".into();
    s.description = "two 1D conduction slabs, implicit coupling".into();
    s.coupling.macro_step = 10.0;
    let (s1, s2) = toy_schedules();
    for (d, sched) in s.domains.iter_mut().zip([s1, s2]) {
        let ModelSpec::Lumped(c) = &d.model else { unreachable!() };
        d.model = ModelSpec::Oned(OneDConfig {
            nodes: 50,
            material: c.material,
            length: TOY_LENGTH,
            area: 1.0,
            boundary: boundary(sched, Sign::Cooling),
            fourier: 0.4,
            continuity: Continuity::Opposite,
        });
    }
    s
}

/// Parameters of the melting study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventsParams {
    pub m1: f64,
    pub m2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub hbar: f64,
    /// Interface conductance of domain 2, `lambda2 / L2`.
    pub k2: f64,
    pub t_fus: f64,
    pub residual_mass: f64,
    /// Energy to heat domain 2 to fusion and melt it; fixes the fusion enthalpy.
    pub e_star: f64,
    pub t_boundary: f64,
    pub t_initial: f64,
}

impl Default for EventsParams {
    fn default() -> Self {
        Self {
            m1: 905.0,
            m2: 500.0,
            rho1: 8000.0,
            rho2: 1e4,
            tau1: 8000.0,
            tau2: 1e4,
            hbar: 0.5,
            k2: 22.3,
            t_fus: 2100.0,
            residual_mass: 150.0,
            e_star: 1e8,
            t_boundary: 3000.0,
            t_initial: 2000.0,
        }
    }
}

/// Melting study with the default parameters.
pub fn events(scheme: Scheme, dt: f64) -> Scenario {
    events_with(&EventsParams::default(), scheme, dt)
}

/// Melting study: both boundaries jump to `t_boundary` at `0+`, domain 2
/// melts onto domain 1 until the residual mass remains, then the run
/// continues to stationarity.
pub fn events_with(p: &EventsParams, scheme: Scheme, dt: f64) -> Scenario {
    // tau = m c / k on a unit cross-section.
    let c2 = p.k2 * p.tau2 / p.m2;
    let k1 = p.hbar * p.k2;
    let c1 = k1 * p.tau1 / p.m1;
    let l1 = p.m1 / p.rho1;
    let l2 = p.m2 / p.rho2;
    let dh = p.e_star / p.m2 - c2 * (p.t_fus - p.t_initial);
    let mut m1 = material(p.rho1, c1, k1 * l1);
    let mut m2 = material(p.rho2, c2, p.k2 * l2);
    m1.fusion_temperature = p.t_fus;
    m2.fusion_temperature = p.t_fus;
    m2.fusion_enthalpy = dh;
    let lumped = |material: MaterialProps, mass: f64| LumpedConfig {
        micro_step: 1.0,
        integration: Integration::ImplicitEuler,
        material,
        geometry: GeometrySpec::cylinder(1.0, material.density, mass).expect("static geometry"),
        boundary: boundary(vec![(0.0, p.t_boundary)], Sign::Cooling),
        boundary_conduction: true,
        continuity: Continuity::Opposite,
    };
    Scenario {
        name: "events".into(),
        description: "melting of domain 2 onto domain 1 with state transitions".into(),
        coupling: coupling(
            scheme,
            dt,
            RelaxationStrategy::Aitken {
                omega0: 0.5,
                omega_max: 1.0,
            },
        ),
        end: EndCondition {
            t_end: 2e5,
            stationarity: Some(Stationarity {
                threshold: 1e-4,
                window: 10,
            }),
        },
        domains: vec![
            DomainSpec {
                id: 1,
                neighbor: 2,
                role: Role::Dirichlet,
                temperature: p.t_initial,
                thresholds: None,
                model: ModelSpec::Lumped(lumped(m1, p.m1)),
            },
            DomainSpec {
                id: 2,
                neighbor: 1,
                role: Role::Neumann,
                temperature: p.t_initial,
                thresholds: Some(ThresholdParams {
                    melt_trigger: p.t_fus,
                    residual_mass: p.residual_mass,
                }),
                model: ModelSpec::Lumped(lumped(m2, p.m2)),
            },
        ],
    }
}
