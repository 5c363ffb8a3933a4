//! One-dimensional finite-difference heat conduction solver used as a
//! reference for the lumped models.

use serde::{Deserialize, Serialize};

use super::{InterfaceMap, MicroGrid, Phase, Role, Solver, SolverError, SolverOutcome};
use crate::model::{check_positive, BoundarySpec, Component, DomainId, InterfaceVariables, MaterialProps, SubdomainState};
use crate::solvers::Continuity;

fn default_nodes() -> usize {
    50
}

fn default_fourier() -> f64 {
    0.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneDConfig {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    pub material: MaterialProps,
    pub length: f64,
    #[serde(default = "one")]
    pub area: f64,
    pub boundary: BoundarySpec,
    /// Mesh Fourier number used to pick the explicit time step.
    #[serde(default = "default_fourier")]
    pub fourier: f64,
    #[serde(default)]
    pub continuity: Continuity,
}

fn one() -> f64 {
    1.0
}

impl OneDConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        self.material.validate()?;
        check_positive("length", self.length)?;
        check_positive("area", self.area)?;
        if self.nodes < 3 {
            return Err(SolverError::Config(format!("at least 3 nodes required, got {}", self.nodes)));
        }
        if !(self.fourier > 0.0 && self.fourier <= 0.5) {
            return Err(SolverError::Config(format!(
                "explicit scheme unstable for mesh Fourier number {}",
                self.fourier
            )));
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        self.length / (self.nodes - 1) as f64
    }

    pub fn diffusivity(&self) -> f64 {
        self.material.conductivity / (self.material.density * self.material.heat_capacity)
    }

    /// Explicit time step from the mesh Fourier limit.
    pub fn micro_step(&self) -> f64 {
        self.fourier * self.dz() * self.dz() / self.diffusivity()
    }

    pub fn mass(&self) -> f64 {
        self.material.density * self.area * self.length
    }
}

/// Mean temperature of a nodal profile (trapezoidal rule).
pub fn profile_mean(profile: &[f64]) -> f64 {
    let n = profile.len();
    let inner: f64 = profile[1..n - 1].iter().sum();
    (inner + 0.5 * (profile[0] + profile[n - 1])) / (n - 1) as f64
}

/// Outward flux through the interface end from a second-order one-sided difference.
fn face_flux(profile: &[f64], lambda: f64, dz: f64) -> f64 {
    let n = profile.len();
    -lambda * (3.0 * profile[n - 1] - 4.0 * profile[n - 2] + profile[n - 3]) / (2.0 * dz)
}

/// Face temperature that produces the outward flux `flux`.
fn face_for_flux(profile: &[f64], lambda: f64, dz: f64, flux: f64) -> f64 {
    let n = profile.len();
    (4.0 * profile[n - 2] - profile[n - 3] - 2.0 * dz * flux / lambda) / 3.0
}

/// Advances the nodal profile over `[t_start, t_end]`. Node 0 sits on the
/// external boundary, the last node on the interface. Returns the outgoing
/// interface variables (interval means of flux and face temperature) and the
/// new profile.
pub fn advance_1d_reference(
    profile: &[f64],
    input: &InterfaceVariables,
    t_start: f64,
    t_end: f64,
    cfg: &OneDConfig,
    role: Role,
) -> Result<(InterfaceVariables, Vec<f64>), SolverError> {
    cfg.validate()?;
    input.validate()?;
    if profile.len() != cfg.nodes {
        return Err(SolverError::Config(format!(
            "profile has {} nodes, config expects {}",
            profile.len(),
            cfg.nodes
        )));
    }
    if !(t_end > t_start) {
        return Err(SolverError::Precondition(format!("empty interval [{t_start}, {t_end}]")));
    }
    let lambda = cfg.material.conductivity;
    let dz = cfg.dz();
    let kappa = cfg.diffusivity();
    let n = cfg.nodes;
    let imposed_flux = cfg.continuity.apply(input.flux, input.area, cfg.area);

    let grid = MicroGrid::new(t_start, t_end, cfg.micro_step());
    let mut cur = profile.to_vec();
    let mut next = cur.clone();
    let mut flux_integral = 0.0;
    let mut face_integral = 0.0;
    for j in 0..grid.steps {
        let t0 = grid.time(j);
        let h = grid.time(j + 1) - t0;
        let fo = kappa * h / (dz * dz);
        let tb = cfg.boundary.temperature.value_at(t0);
        cur[0] = tb;
        if role == Role::Dirichlet {
            cur[n - 1] = input.temperature;
        }
        for i in 1..n - 1 {
            next[i] = cur[i] + fo * (cur[i - 1] - 2.0 * cur[i] + cur[i + 1]);
        }
        next[0] = tb;
        let flux = match role {
            Role::Dirichlet => {
                next[n - 1] = input.temperature;
                face_flux(&next, lambda, dz)
            }
            Role::Neumann => {
                next[n - 1] = face_for_flux(&next, lambda, dz, imposed_flux);
                imposed_flux
            }
        };
        flux_integral += flux * h;
        face_integral += next[n - 1] * h;
        std::mem::swap(&mut cur, &mut next);
    }
    let out = InterfaceVariables {
        flux: flux_integral / (t_end - t_start),
        temperature: face_integral / (t_end - t_start),
        mass_flow: 0.0,
        area: cfg.area,
    };
    Ok((out, cur))
}

/// Solver wrapper around [`advance_1d_reference`].
#[derive(Debug, Clone)]
pub struct OneDSolver {
    id: DomainId,
    neighbor: DomainId,
    role: Role,
    cfg: OneDConfig,
    profile: Vec<f64>,
    pending: Option<Vec<f64>>,
}

impl OneDSolver {
    pub fn new(id: DomainId, neighbor: DomainId, role: Role, cfg: OneDConfig, temperature: f64) -> Result<Self, SolverError> {
        cfg.validate()?;
        check_positive("temperature", temperature)?;
        let profile = vec![temperature; cfg.nodes];
        Ok(Self {
            id,
            neighbor,
            role,
            cfg,
            profile,
            pending: None,
        })
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }
}

impl Solver for OneDSolver {
    fn id(&self) -> DomainId {
        self.id
    }

    fn phase(&self) -> Phase {
        Phase::Heating
    }

    fn state(&self) -> SubdomainState {
        SubdomainState {
            mass: self.cfg.mass(),
            temperature: profile_mean(&self.profile),
        }
    }

    fn initial_outputs(&self) -> InterfaceMap {
        let t = self.profile[self.cfg.nodes - 1];
        InterfaceMap::from([(self.neighbor, InterfaceVariables::new(0.0, t, 0.0, self.cfg.area))])
    }

    fn exports(&self, neighbor: DomainId) -> Vec<Component> {
        if neighbor != self.neighbor {
            return Vec::new();
        }
        match self.role {
            Role::Dirichlet => vec![Component::Flux],
            Role::Neumann => vec![Component::Temperature],
        }
    }

    fn advance(&mut self, t_start: f64, t_end: f64, inputs: &InterfaceMap) -> Result<SolverOutcome, SolverError> {
        let input = inputs
            .get(&self.neighbor)
            .ok_or(SolverError::MissingInput(self.neighbor))?;
        let (out, profile) = advance_1d_reference(&self.profile, input, t_start, t_end, &self.cfg, self.role)?;
        let new_state = SubdomainState {
            mass: self.cfg.mass(),
            temperature: profile_mean(&profile),
        };
        self.pending = Some(profile);
        Ok(SolverOutcome {
            outputs: InterfaceMap::from([(self.neighbor, out)]),
            new_state,
            event: None,
            t_end,
        })
    }

    fn commit(&mut self, _apply_event: bool) -> Result<(), SolverError> {
        self.profile = self.pending.take().ok_or(SolverError::NothingPending)?;
        Ok(())
    }
}
