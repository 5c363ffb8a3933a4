//! Parallel parameter sweeps over a base scenario.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::run::run;
use super::scenario::{Overrides, Scenario};
use super::HarnessError;
use crate::analysis::r12;
use crate::coupling::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Dt,
    Omega,
    Hbar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub scheme: Scheme,
    pub dt: f64,
    pub hbar: f64,
    pub r12: f64,
    /// `dt` within `[tau / 100, tau / 10]`.
    pub in_window: bool,
    pub converged: bool,
    pub error: Option<String>,
    pub steps: usize,
    pub iterations: usize,
    pub advances: usize,
    pub t_hm: Option<f64>,
    pub t_me: Option<f64>,
    pub m1_final: Option<f64>,
    pub t1_final: Option<f64>,
    pub peak_eps_global: Option<f64>,
    pub envelope_ratio: Option<f64>,
}

fn point(base: &Scenario, parameter: SweepParameter, value: f64) -> Result<SweepRow, HarnessError> {
    let mut scn = base.clone();
    let o = match parameter {
        SweepParameter::Dt => Overrides {
            dt: Some(value),
            ..Default::default()
        },
        SweepParameter::Omega => Overrides {
            omega: Some(value),
            ..Default::default()
        },
        SweepParameter::Hbar => Overrides {
            hbar: Some(value),
            ..Default::default()
        },
    };
    scn.apply(&o)?;
    let dt = scn.coupling.macro_step;
    let mut row = SweepRow {
        parameter,
        value,
        scheme: scn.coupling.scheme,
        dt,
        hbar: scn.hbar(),
        r12: r12(&scn.stability_inputs()),
        in_window: scn.dt_in_window(dt),
        converged: true,
        error: None,
        steps: 0,
        iterations: 0,
        advances: 0,
        t_hm: None,
        t_me: None,
        m1_final: None,
        t1_final: None,
        peak_eps_global: None,
        envelope_ratio: None,
    };
    let report = match run(&scn) {
        Ok(r) => r,
        Err(HarnessError::Coupling { source, partial, .. }) => {
            row.converged = false;
            row.error = Some(source.to_string());
            *partial
        }
        Err(e) => return Err(e),
    };
    let s = report.summary;
    row.steps = s.steps;
    row.iterations = s.iterations;
    row.advances = s.advances;
    row.t_hm = s.t_hm;
    row.t_me = s.t_me;
    row.m1_final = Some(s.m1_final);
    row.t1_final = Some(s.t1_final);
    row.peak_eps_global = s.peak_eps_global;
    row.envelope_ratio = s.envelope_ratio;
    Ok(row)
}

/// Runs `base` once per value, in parallel; rows keep the order of `values`.
pub fn sweep(base: &Scenario, parameter: SweepParameter, values: &[f64]) -> Result<Vec<SweepRow>, HarnessError> {
    values.par_iter().map(|&v| point(base, parameter, v)).collect()
}
