//! Scenario files: coupling settings, stopping rule and domain definitions.

use serde::{Deserialize, Serialize};

use crate::analysis::StabilityInputs;
use crate::coupling::{CouplingConfig, RelaxationStrategy, Scheme};
use crate::model::{DomainId, InterfaceRegistry, SubdomainState};
use crate::solvers::{LumpedConfig, LumpedSolver, OneDConfig, OneDSolver, Role, Solver, ThresholdParams};

use super::HarnessError;

fn default_threshold() -> f64 {
    1e-4
}

fn default_window() -> usize {
    10
}

/// Stop once `|dT1/dt|` stays below `threshold` (K/s) for `window` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stationarity {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndCondition {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationarity: Option<Stationarity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Lumped(LumpedConfig),
    Oned(OneDConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub id: DomainId,
    pub neighbor: DomainId,
    pub role: Role,
    /// Initial uniform temperature. Lumped masses follow from the geometry.
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdParams>,
    pub model: ModelSpec,
}

impl DomainSpec {
    /// Conduction time `rho c L^2 / lambda` at the initial state.
    pub fn time_constant(&self) -> f64 {
        let (m, l) = match &self.model {
            ModelSpec::Lumped(c) => (c.material, c.geometry.length),
            ModelSpec::Oned(c) => (c.material, c.length),
        };
        m.density * m.heat_capacity * l * l / m.conductivity
    }

    /// Interface conductance `lambda / L` at the initial state.
    pub fn conductance(&self) -> f64 {
        match &self.model {
            ModelSpec::Lumped(c) => c.material.conductivity / c.geometry.length,
            ModelSpec::Oned(c) => c.material.conductivity / c.length,
        }
    }

    fn area(&self) -> f64 {
        match &self.model {
            ModelSpec::Lumped(c) => c.geometry.area,
            ModelSpec::Oned(c) => c.area,
        }
    }

    pub fn initial_state(&self) -> SubdomainState {
        match &self.model {
            ModelSpec::Lumped(c) => SubdomainState {
                mass: c.material.density * c.geometry.volume,
                temperature: self.temperature,
            },
            ModelSpec::Oned(c) => SubdomainState {
                mass: c.mass(),
                temperature: self.temperature,
            },
        }
    }

    pub fn build(&self) -> Result<Box<dyn Solver>, HarnessError> {
        Ok(match &self.model {
            ModelSpec::Lumped(c) => Box::new(LumpedSolver::new(
                self.id,
                self.neighbor,
                self.role,
                c.clone(),
                self.initial_state(),
                self.thresholds,
            )?),
            ModelSpec::Oned(c) => {
                if self.thresholds.is_some() {
                    return Err(HarnessError::Scenario(format!(
                        "domain {}: the 1D model has no phase changes",
                        self.id
                    )));
                }
                Box::new(OneDSolver::new(self.id, self.neighbor, self.role, c.clone(), self.temperature)?)
            }
        })
    }
}

/// Two coupled domains; the first listed is reported as domain 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub coupling: CouplingConfig,
    pub end: EndCondition,
    #[serde(rename = "domain")]
    pub domains: Vec<DomainSpec>,
}

/// Command-line adjustments applied on top of a scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scheme: Option<Scheme>,
    pub dt: Option<f64>,
    pub omega: Option<f64>,
    pub relaxation: Option<RelaxationStrategy>,
    pub eps_rel: Option<f64>,
    pub alpha: Option<f64>,
    pub hbar: Option<f64>,
    pub t_end: Option<f64>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let s: Scenario = toml::from_str(text).map_err(|e| HarnessError::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string_pretty(self).map_err(|e| HarnessError::Scenario(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Scenario(m));
        self.coupling.validate()?;
        if self.domains.len() != 2 {
            return bad(format!("exactly two domains are supported, got {}", self.domains.len()));
        }
        let (a, b) = (&self.domains[0], &self.domains[1]);
        if a.id == b.id || a.neighbor != b.id || b.neighbor != a.id {
            return bad("the two domains must name each other as neighbors".into());
        }
        if a.role == b.role {
            return bad("one domain must be dirichlet and the other neumann".into());
        }
        for d in &self.domains {
            if !(d.temperature > 0.0 && d.temperature.is_finite()) {
                return bad(format!("domain {}: temperature must be > 0", d.id));
            }
            if let ModelSpec::Lumped(c) = &d.model {
                c.validate()?;
            }
            if let ModelSpec::Oned(c) = &d.model {
                c.validate()?;
            }
        }
        if !(self.end.t_end > 0.0 && self.end.t_end.is_finite()) {
            return bad(format!("t_end must be > 0, got {}", self.end.t_end));
        }
        for order in [Some(&self.coupling.order), self.coupling.ecs_order.as_ref()].into_iter().flatten() {
            let mut ids = order.clone();
            ids.sort_unstable();
            let mut want = vec![a.id, b.id];
            want.sort_unstable();
            if ids != want {
                return bad(format!("order {order:?} must list domains {} and {}", a.id, b.id));
            }
        }
        if a.area() != b.area() {
            return bad("both domains must share the interface area".into());
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), HarnessError> {
        if let Some(s) = o.scheme {
            self.coupling.scheme = s;
        }
        if let Some(dt) = o.dt {
            self.coupling.macro_step = dt;
        }
        if let Some(r) = o.relaxation {
            self.coupling.relaxation = r;
        }
        if let Some(w) = o.omega {
            self.coupling.relaxation = RelaxationStrategy::Constant { omega: w };
        }
        if let Some(e) = o.eps_rel {
            self.coupling.eps_rel = e;
        }
        if let Some(a) = o.alpha {
            self.coupling.alpha = a;
        }
        if let Some(t) = o.t_end {
            self.end.t_end = t;
        }
        if let Some(h) = o.hbar {
            self.set_hbar(h)?;
        }
        self.validate()
    }

    pub fn domain1(&self) -> &DomainSpec {
        &self.domains[0]
    }

    pub fn domain2(&self) -> &DomainSpec {
        &self.domains[1]
    }

    /// Conductance ratio `(lambda1 / L1) / (lambda2 / L2)`.
    pub fn hbar(&self) -> f64 {
        self.domain1().conductance() / self.domain2().conductance()
    }

    /// Rescales conductivity and heat capacity of domain 1 together so the
    /// conductance ratio becomes `hbar` while its time constant is kept.
    pub fn set_hbar(&mut self, hbar: f64) -> Result<(), HarnessError> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(HarnessError::Scenario(format!("hbar must be > 0, got {hbar}")));
        }
        let factor = hbar / self.hbar();
        let material = match &mut self.domains[0].model {
            ModelSpec::Lumped(c) => &mut c.material,
            ModelSpec::Oned(c) => &mut c.material,
        };
        material.conductivity *= factor;
        material.heat_capacity *= factor;
        Ok(())
    }

    /// Smallest conduction time of the two domains.
    pub fn tau_min(&self) -> f64 {
        self.domain1().time_constant().min(self.domain2().time_constant())
    }

    /// Whether `dt` lies in the recommended window `[tau / 100, tau / 10]`.
    pub fn dt_in_window(&self, dt: f64) -> bool {
        let tau = self.tau_min();
        dt >= tau / 100.0 * (1.0 - 1e-12) && dt <= tau / 10.0 * (1.0 + 1e-12)
    }

    pub fn stability_inputs(&self) -> StabilityInputs {
        StabilityInputs {
            tau1: self.domain1().time_constant(),
            tau2: self.domain2().time_constant(),
            hbar: self.hbar(),
            dt: self.coupling.macro_step,
        }
    }

    pub fn build_solvers(&self) -> Result<Vec<Box<dyn Solver>>, HarnessError> {
        self.domains.iter().map(DomainSpec::build).collect()
    }

    /// Registry seeded with every solver's rest-state outputs.
    pub fn initial_registry(&self, solvers: &[Box<dyn Solver>]) -> Result<InterfaceRegistry, HarnessError> {
        let (a, b) = (&solvers[0], &solvers[1]);
        let ba = a.initial_outputs()[&b.id()];
        let bb = b.initial_outputs()[&a.id()];
        let mut reg = InterfaceRegistry::new();
        reg.connect(a.id(), b.id(), ba, bb)?;
        Ok(reg)
    }
}
