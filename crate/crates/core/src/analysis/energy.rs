//! Interface energy imbalance bookkeeping.

use crate::coupling::Scheme;

/// Reference energy: heat needed to bring domain 2 to fusion and melt it.
pub fn e_star(mass: f64, heat_capacity: f64, fusion_temperature: f64, temperature: f64, fusion_enthalpy: f64) -> f64 {
    mass * heat_capacity * (fusion_temperature - temperature) + fusion_enthalpy * mass
}

/// Times at which each side's interface values were produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timestamps {
    pub step: usize,
    /// End of the committed interval.
    pub t: f64,
    /// Time the domain-1 flux refers to.
    pub t_side1: f64,
    /// Time the domain-2 flux and mass flow refer to.
    pub t_side2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    pub scheme: Scheme,
    pub t_side1: f64,
    pub t_side2: f64,
    pub de_local: f64,
    pub de_cumulative: f64,
    pub eps_local: f64,
    pub eps_cumulative: f64,
}

/// Per-step and cumulative interface energy imbalance.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    e_star: f64,
    area: f64,
    cumulative: f64,
    rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    /// `e_star` is frozen for the whole run.
    pub fn new(e_star: f64, area: f64) -> Self {
        assert!(e_star > 0.0, "reference energy must be positive");
        Self {
            e_star,
            area,
            cumulative: 0.0,
            rows: Vec::new(),
        }
    }

    pub fn e_star(&self) -> f64 {
        self.e_star
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }

    pub fn peak_global(&self) -> f64 {
        self.rows.iter().map(|r| r.eps_cumulative.abs()).fold(0.0, f64::max)
    }

    pub fn peak_local(&self) -> f64 {
        self.rows.iter().map(|r| r.eps_local.abs()).fold(0.0, f64::max)
    }
}

/// Appends one step: `dE = (phi12 + phi21 - dh * mdot21) * A * dt`.
///
/// `phi12` is the flux domain 1 emitted and `phi21`, `mdot21` what domain 2
/// absorbed or consumed over the step; they vanish together when both
/// sides agree. Under the explicit scheme the two sides refer to different
/// times, which `timestamps` records.
#[allow(clippy::too_many_arguments)]
pub fn energy_update(
    ledger: &mut EnergyLedger,
    scheme: Scheme,
    phi12: f64,
    phi21: f64,
    mdot21: f64,
    dh_fus: f64,
    dt: f64,
    timestamps: Timestamps,
) -> &LedgerRow {
    let de = (phi12 + phi21 - dh_fus * mdot21) * ledger.area * dt;
    ledger.cumulative += de;
    ledger.rows.push(LedgerRow {
        step: timestamps.step,
        t: timestamps.t,
        scheme,
        t_side1: timestamps.t_side1,
        t_side2: timestamps.t_side2,
        de_local: de,
        de_cumulative: ledger.cumulative,
        eps_local: de / ledger.e_star,
        eps_cumulative: ledger.cumulative / ledger.e_star,
    });
    ledger.rows.last().expect("just pushed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(step: usize) -> Timestamps {
        Timestamps {
            step,
            t: step as f64,
            t_side1: step as f64,
            t_side2: step as f64,
        }
    }

    #[test]
    fn balanced_step_is_zero() {
        let mut l = EnergyLedger::new(1e8, 1.0);
        let row = energy_update(&mut l, Scheme::Ics, 5e4, -3e4, 0.2, 1e5, 100.0, ts(1));
        assert_eq!(row.de_local, 0.0);
    }

    #[test]
    fn e_star_formula() {
        assert_eq!(e_star(500.0, 1000.0, 2100.0, 2000.0, 1e5), 500.0 * 1000.0 * 100.0 + 1e5 * 500.0);
    }

    proptest! {
        #[test]
        fn cumulative_is_exact_running_sum(xs in proptest::collection::vec(-1e5..1e5f64, 1..200)) {
            let mut l = EnergyLedger::new(1e8, 1.0);
            for (i, x) in xs.iter().enumerate() {
                energy_update(&mut l, Scheme::Ecs, *x, 0.0, 0.0, 1.0, 10.0, ts(i));
            }
            let resum = l.rows().iter().fold(0.0, |acc, r| acc + r.de_local);
            prop_assert_eq!(resum, l.cumulative());
            prop_assert_eq!(l.rows().last().unwrap().de_cumulative, l.cumulative());
        }
    }
}
