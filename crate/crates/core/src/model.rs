//! Shared domain types: subdomain state, material and geometry data,
//! boundary schedules, directed interface variables and their registry.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a subdomain.
pub type DomainId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("no interface registered from domain {from} to domain {to}")]
    UnknownInterface { from: DomainId, to: DomainId },
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

pub(crate) fn check_finite(field: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite { field, value })
    }
}

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<f64, ModelError> {
    check_finite(field, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Invalid {
            field,
            reason: format!("must be > 0, got {value}"),
        })
    }
}

pub(crate) fn check_non_negative(field: &'static str, value: f64) -> Result<f64, ModelError> {
    check_finite(field, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Invalid {
            field,
            reason: format!("must be >= 0, got {value}"),
        })
    }
}

/// State vector of one lumped subdomain: mass and mean temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubdomainState {
    pub mass: f64,
    pub temperature: f64,
}

impl SubdomainState {
    pub fn new(mass: f64, temperature: f64) -> Result<Self, ModelError> {
        let s = Self { mass, temperature };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_non_negative("mass", self.mass)?;
        check_positive("temperature", self.temperature)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialProps {
    pub density: f64,
    pub heat_capacity: f64,
    pub conductivity: f64,
    #[serde(default)]
    pub fusion_enthalpy: f64,
    /// Omitted for materials that never melt.
    #[serde(default = "default_fusion_temperature", skip_serializing_if = "never_melts")]
    pub fusion_temperature: f64,
    /// Residual power per unit mass, W/kg.
    #[serde(default)]
    pub residual_power: f64,
}

fn default_fusion_temperature() -> f64 {
    f64::MAX
}

fn never_melts(t: &f64) -> bool {
    *t == f64::MAX
}

impl MaterialProps {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_positive("density", self.density)?;
        check_positive("heat_capacity", self.heat_capacity)?;
        check_positive("conductivity", self.conductivity)?;
        check_non_negative("fusion_enthalpy", self.fusion_enthalpy)?;
        check_positive("fusion_temperature", self.fusion_temperature)?;
        check_finite("residual_power", self.residual_power)?;
        Ok(())
    }
}

/// Characteristic length, volume and cross-section of a subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub length: f64,
    pub volume: f64,
    pub area: f64,
    /// When set, `volume == area * length` is enforced.
    #[serde(default = "yes")]
    pub cylindrical: bool,
}

fn yes() -> bool {
    true
}

impl GeometrySpec {
    /// Cylinder of cross-section `area` holding `mass` at `density`.
    pub fn cylinder(area: f64, density: f64, mass: f64) -> Result<Self, ModelError> {
        check_positive("area", area)?;
        check_positive("density", density)?;
        check_non_negative("mass", mass)?;
        let length = mass / (density * area);
        Ok(Self {
            length,
            volume: area * length,
            area,
            cylindrical: true,
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_positive("length", self.length)?;
        check_positive("volume", self.volume)?;
        check_positive("area", self.area)?;
        if self.cylindrical {
            let expected = self.area * self.length;
            if (self.volume - expected).abs() > 1e-9 * expected {
                return Err(ModelError::Invalid {
                    field: "volume",
                    reason: format!("cylinder requires V = A*L = {expected}, got {}", self.volume),
                });
            }
        }
        Ok(())
    }
}

/// Orientation of a flux in an energy balance: +1 heats, -1 cools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Heating,
    #[default]
    Cooling,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Heating => 1.0,
            Sign::Cooling => -1.0,
        }
    }
}

/// Right-continuous piecewise-constant schedule of `(time, value)` points.
///
/// Before the first point the first value applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Schedule {
    points: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::Invalid {
                field: "schedule",
                reason: "at least one point required".into(),
            });
        }
        for &(t, v) in &points {
            check_finite("schedule time", t)?;
            check_finite("schedule value", v)?;
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(ModelError::Invalid {
                field: "schedule",
                reason: "times must be strictly increasing".into(),
            });
        }
        Ok(Self { points })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            points: vec![(0.0, value)],
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.points.partition_point(|&(s, _)| s <= t);
        self.points[idx.saturating_sub(1)].1
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

impl TryFrom<Vec<(f64, f64)>> for Schedule {
    type Error = ModelError;
    fn try_from(points: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Schedule::new(points)
    }
}

impl From<Schedule> for Vec<(f64, f64)> {
    fn from(s: Schedule) -> Self {
        s.points
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub temperature: Schedule,
    /// Sign of the external boundary flux in the energy balance.
    #[serde(default)]
    pub boundary_sign: Sign,
    /// Sign of the interface flux in the energy balance.
    #[serde(default)]
    pub interface_sign: Sign,
}

impl BoundarySpec {
    pub fn constant(temperature: f64) -> Self {
        Self {
            temperature: Schedule::constant(temperature),
            boundary_sign: Sign::Cooling,
            interface_sign: Sign::Cooling,
        }
    }
}

/// Directed interface data `b_ij = (phi, T, mdot, A)` as seen from domain i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceVariables {
    pub flux: f64,
    pub temperature: f64,
    pub mass_flow: f64,
    pub area: f64,
}

impl InterfaceVariables {
    pub fn new(flux: f64, temperature: f64, mass_flow: f64, area: f64) -> Self {
        Self {
            flux,
            temperature,
            mass_flow,
            area,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_finite("flux", self.flux)?;
        check_finite("temperature", self.temperature)?;
        check_finite("mass_flow", self.mass_flow)?;
        check_positive("area", self.area)?;
        Ok(())
    }

    pub fn component(&self, c: Component) -> f64 {
        match c {
            Component::Flux => self.flux,
            Component::Temperature => self.temperature,
            Component::MassFlow => self.mass_flow,
        }
    }

    pub fn set_component(&mut self, c: Component, value: f64) {
        match c {
            Component::Flux => self.flux = value,
            Component::Temperature => self.temperature = value,
            Component::MassFlow => self.mass_flow = value,
        }
    }
}

/// Scalar fields of [`InterfaceVariables`] that a solver may export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Flux,
    Temperature,
    MassFlow,
}

/// Directed interface storage realizing the projector `P_ij`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterfaceRegistry {
    slots: BTreeMap<(DomainId, DomainId), InterfaceVariables>,
}

impl InterfaceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers both directions of the interface between `i` and `j`.
    pub fn connect(
        &mut self,
        i: DomainId,
        j: DomainId,
        b_ij: InterfaceVariables,
        b_ji: InterfaceVariables,
    ) -> Result<(), ModelError> {
        if i == j {
            return Err(ModelError::Invalid {
                field: "interface",
                reason: format!("domain {i} cannot neighbor itself"),
            });
        }
        b_ij.validate()?;
        b_ji.validate()?;
        self.slots.insert((i, j), b_ij);
        self.slots.insert((j, i), b_ji);
        Ok(())
    }

    pub fn project(&self, i: DomainId, j: DomainId) -> Result<InterfaceVariables, ModelError> {
        self.slots
            .get(&(i, j))
            .copied()
            .ok_or(ModelError::UnknownInterface { from: i, to: j })
    }

    pub fn set_interface(
        &mut self,
        i: DomainId,
        j: DomainId,
        value: InterfaceVariables,
    ) -> Result<(), ModelError> {
        value.validate()?;
        match self.slots.get_mut(&(i, j)) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(ModelError::UnknownInterface { from: i, to: j }),
        }
    }

    /// The neighbor set `N_i`.
    pub fn neighbors(&self, i: DomainId) -> BTreeSet<DomainId> {
        self.slots
            .keys()
            .filter(|(a, _)| *a == i)
            .map(|&(_, b)| b)
            .collect()
    }

    pub fn degree(&self, i: DomainId) -> usize {
        self.neighbors(i).len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (DomainId, DomainId)> + '_ {
        self.slots.keys().copied()
    }

    /// All slots `b_ji` entering domain `i`, keyed by the source `j`.
    pub fn inputs_of(&self, i: DomainId) -> BTreeMap<DomainId, InterfaceVariables> {
        self.slots
            .iter()
            .filter(|((_, b), _)| *b == i)
            .map(|(&(a, _), v)| (a, *v))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(phi: f64, t: f64) -> InterfaceVariables {
        InterfaceVariables::new(phi, t, 0.0, 1.0)
    }

    #[test]
    fn project_returns_stored_tuple() {
        let mut reg = InterfaceRegistry::new();
        reg.connect(1, 2, b(5.0, 2000.0), b(-5.0, 2000.0)).unwrap();
        assert_eq!(reg.project(1, 2).unwrap(), b(5.0, 2000.0));
    }

    #[test]
    fn directed_pairs_are_distinct() {
        let mut reg = InterfaceRegistry::new();
        reg.connect(1, 2, b(5.0, 2000.0), b(0.0, 1.0)).unwrap();
        reg.set_interface(2, 1, b(7.0, 2100.0)).unwrap();
        assert_eq!(reg.project(1, 2).unwrap().flux, 5.0);
        assert_eq!(reg.project(2, 1).unwrap().temperature, 2100.0);
        assert_eq!(
            reg.project(1, 3),
            Err(ModelError::UnknownInterface { from: 1, to: 3 })
        );
    }

    #[test]
    fn chain_neighbors() {
        let mut reg = InterfaceRegistry::new();
        reg.connect(1, 2, b(0.0, 1.0), b(0.0, 1.0)).unwrap();
        reg.connect(2, 3, b(0.0, 1.0), b(0.0, 1.0)).unwrap();
        assert_eq!(reg.neighbors(2), BTreeSet::from([1, 3]));
        assert_eq!(reg.degree(2), 2);
        assert_eq!(reg.degree(1), 1);
    }

    #[test]
    fn nan_is_rejected() {
        let mut reg = InterfaceRegistry::new();
        reg.connect(1, 2, b(0.0, 1.0), b(0.0, 1.0)).unwrap();
        assert!(matches!(
            reg.set_interface(1, 2, b(f64::NAN, 1.0)),
            Err(ModelError::NonFinite { field: "flux", .. })
        ));
    }

    #[test]
    fn schedule_is_right_continuous() {
        let s = Schedule::new(vec![(0.0, 3000.0), (3000.0, 2000.0)]).unwrap();
        assert_eq!(s.value_at(-1.0), 3000.0);
        assert_eq!(s.value_at(0.0), 3000.0);
        assert_eq!(s.value_at(2999.9), 3000.0);
        assert_eq!(s.value_at(3000.0), 2000.0);
        assert!(Schedule::new(vec![(1.0, 0.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn geometry_cylinder_consistency() {
        let g = GeometrySpec::cylinder(1.0, 1e4, 150.0).unwrap();
        assert!((g.length - 0.015).abs() < 1e-15);
        g.validate().unwrap();
        let bad = GeometrySpec {
            volume: 2.0,
            ..g
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn state_invariants() {
        assert!(SubdomainState::new(-1.0, 300.0).is_err());
        assert!(SubdomainState::new(1.0, 0.0).is_err());
        assert!(SubdomainState::new(0.0, 300.0).is_ok());
    }
}
