//! CSV files written for a run or a sweep.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::run::RunReport;
use super::sweep::SweepRow;
use super::HarnessError;

#[derive(Serialize)]
struct EventRow {
    transition: String,
    t_star: f64,
}

#[derive(Serialize)]
struct LedgerCsvRow {
    step: usize,
    t: f64,
    #[serde(rename = "dE_local")]
    de_local: f64,
    #[serde(rename = "dE_cumulative")]
    de_cumulative: f64,
    eps_local: f64,
    eps_cumulative: f64,
}

#[derive(Serialize)]
struct TraceRow {
    step: usize,
    k: usize,
    t_candidate: f64,
    residual_norm: f64,
    omega: Option<f64>,
    event_time: Option<f64>,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `series.csv`, `events.csv`, `ledger.csv`, `trace.csv` and
/// `summary.csv` into `dir`. The ledger file is omitted when domain 2
/// cannot melt.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    write_rows(
        &dir.join("series.csv"),
        &report.series,
        &["t", "T1", "T2", "T21", "phi12", "m2", "state2", "iters"],
    )?;
    write_rows(
        &dir.join("events.csv"),
        report.events.iter().map(|e| EventRow {
            transition: e.transition.to_string(),
            t_star: e.time,
        }),
        &["transition", "t_star"],
    )?;
    if let Some(ledger) = &report.ledger {
        write_rows(
            &dir.join("ledger.csv"),
            ledger.rows().iter().map(|r| LedgerCsvRow {
                step: r.step,
                t: r.t,
                de_local: r.de_local,
                de_cumulative: r.de_cumulative,
                eps_local: r.eps_local,
                eps_cumulative: r.eps_cumulative,
            }),
            &[
                "step",
                "t",
                "dE_local",
                "dE_cumulative",
                "eps_local",
                "eps_cumulative",
            ],
        )?;
    }
    write_rows(
        &dir.join("trace.csv"),
        report.trace.iter().map(|r| TraceRow {
            step: r.step,
            k: r.k,
            t_candidate: r.t_candidate,
            residual_norm: r.residual_norm,
            omega: r.omega,
            event_time: r.event_time,
        }),
        &["step", "k", "t_candidate", "residual_norm", "omega", "event_time"],
    )?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.serialize(&report.summary)?;
    w.flush()?;
    Ok(())
}

/// Writes one row per sweep point to `path`.
pub fn write_sweep(rows: &[SweepRow], path: &Path) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
