//! Algebraic closure laws: stationary conduction fluxes, cylinder geometry,
//! and the residuals of the two interface equilibrium systems.

use thiserror::Error;

use crate::model::{check_finite, check_non_negative, check_positive, GeometrySpec, InterfaceVariables, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("fusion enthalpy is zero: a mobile front needs a melting material")]
    ZeroFusionEnthalpy,
}

/// Inputs of the quadratic-profile conduction closure for one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryClosureInput {
    pub avg_temperature: f64,
    pub opposite_face_temperature: f64,
    pub face_temperature: f64,
    pub conductivity: f64,
    pub length: f64,
}

impl StationaryClosureInput {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_finite("avg_temperature", self.avg_temperature)?;
        check_finite("opposite_face_temperature", self.opposite_face_temperature)?;
        check_finite("face_temperature", self.face_temperature)?;
        check_positive("conductivity", self.conductivity)?;
        check_positive("length", self.length)?;
        Ok(())
    }
}

/// Outward flux through a face for a quadratic temperature profile:
/// `lambda * (6 T - 4 T_face - 2 T_opposite) / L`.
pub fn stationary_flux(input: &StationaryClosureInput) -> Result<f64, ClosureError> {
    input.validate()?;
    Ok(conduction_flux(
        input.conductivity / input.length,
        input.avg_temperature,
        input.face_temperature,
        input.opposite_face_temperature,
    ))
}

/// Unchecked form of [`stationary_flux`] with the conductance `k = lambda / L`.
#[inline]
pub(crate) fn conduction_flux(k: f64, t_avg: f64, t_face: f64, t_opposite: f64) -> f64 {
    k * (6.0 * t_avg - 4.0 * t_face - 2.0 * t_opposite)
}

/// Face temperature that makes the closure return `flux`.
#[inline]
pub(crate) fn face_temperature_for_flux(k: f64, t_avg: f64, t_opposite: f64, flux: f64) -> f64 {
    1.5 * t_avg - 0.5 * t_opposite - 0.25 * flux / k
}

/// Extension point for other closure laws (convective, radiative).
pub trait ClosureLaw {
    fn flux(&self, input: &StationaryClosureInput) -> Result<f64, ClosureError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StationaryClosure;

impl ClosureLaw for StationaryClosure {
    fn flux(&self, input: &StationaryClosureInput) -> Result<f64, ClosureError> {
        stationary_flux(input)
    }
}

/// Updates the cylinder length from the current mass; the area is unchanged.
pub fn cylinder_area(geometry: &GeometrySpec, density: f64, mass: f64) -> Result<(f64, GeometrySpec), ClosureError> {
    check_positive("density", density)?;
    check_positive("area", geometry.area)?;
    check_non_negative("mass", mass)?;
    let length = mass / (density * geometry.area);
    let g = GeometrySpec {
        length,
        volume: geometry.area * length,
        ..*geometry
    };
    Ok((geometry.area, g))
}

/// Mass flow rate leaving domain i through a melting front.
pub fn stefan_balance(phi_ij: f64, phi_ji: f64, a_ij: f64, a_ji: f64, dh_fus: f64) -> Result<f64, ClosureError> {
    check_finite("phi_ij", phi_ij)?;
    check_finite("phi_ji", phi_ji)?;
    check_non_negative("dh_fus", dh_fus)?;
    if dh_fus == 0.0 {
        return Err(ClosureError::ZeroFusionEnthalpy);
    }
    Ok((phi_ij * a_ij + phi_ji * a_ji) / dh_fus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedInterfaceResiduals {
    pub mass: f64,
    pub temperature: f64,
    pub energy: f64,
}

/// Residuals of the fixed thermal-contact conditions; all zero at equilibrium.
pub fn fixed_interface_residuals(b_ij: &InterfaceVariables, b_ji: &InterfaceVariables) -> FixedInterfaceResiduals {
    FixedInterfaceResiduals {
        mass: b_ij.mass_flow.abs() + b_ji.mass_flow.abs(),
        temperature: b_ij.temperature - b_ji.temperature,
        energy: b_ij.flux * b_ij.area + b_ji.flux * b_ji.area,
    }
}
