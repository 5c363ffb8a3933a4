use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lpcosim::analysis::{ecs_characteristic_roots, hbar_crit, omega_bounds, r12, StabilityInputs};
use lpcosim::coupling::{RelaxationStrategy, Scheme};
use lpcosim::harness::{self, builtin, HarnessError, Overrides, Scenario, SweepParameter};

#[derive(Parser)]
#[command(name = "lpcosim", version, about = "Coupled lumped-parameter thermal co-simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV files.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario once per value of a parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: Param,
        /// Comma-separated grid, e.g. `100,50,25,10`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Closed-form stability diagnostics of the two-slab toy problem.
    Analyze {
        #[arg(long, default_value_t = 1000.0)]
        tau1: f64,
        #[arg(long, default_value_t = 1e4)]
        tau2: f64,
        #[arg(long, default_value_t = 1.6)]
        hbar: f64,
        #[arg(long, default_value_t = 100.0)]
        dt: f64,
    },
    /// Print a scenario as TOML.
    Show {
        #[arg(long)]
        scenario: String,
    },
}

#[derive(Args)]
struct Common {
    /// Built-in scenario name or path to a TOML file.
    #[arg(long)]
    scenario: String,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    dt: Option<f64>,
    /// Relaxation factor (initial factor for secant and aitken).
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, value_enum)]
    relaxation: Option<RelaxationArg>,
    #[arg(long)]
    eps_rel: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory (run) or CSV file (sweep).
    #[arg(long, env = "LPCOSIM_OUT", default_value = "out")]
    out: PathBuf,
    /// Reserved; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ecs,
    EcsJacobi,
    Ics,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelaxationArg {
    Constant,
    Secant,
    Aitken,
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Dt,
    Omega,
    Hbar,
}

fn load(name: &str) -> Result<Scenario, HarnessError> {
    if let Some(s) = builtin::by_name(name) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(Path::new(name)).map_err(|e| {
        HarnessError::Scenario(format!("{name}: {e} (built-in scenarios: {})", builtin::NAMES.join(", ")))
    })?;
    Scenario::from_toml(&text)
}

fn scenario(c: &Common) -> Result<Scenario, HarnessError> {
    let mut s = load(&c.scenario)?;
    let relaxation = c.relaxation.map(|r| {
        let w = c.omega.unwrap_or(1.0);
        match r {
            RelaxationArg::Constant => RelaxationStrategy::Constant { omega: w },
            RelaxationArg::Secant => RelaxationStrategy::Secant { omega0: w.min(1.0) },
            RelaxationArg::Aitken => RelaxationStrategy::Aitken {
                omega0: w.min(1.0),
                omega_max: 1.0,
            },
        }
    });
    s.apply(&Overrides {
        scheme: c.scheme.map(|x| match x {
            SchemeArg::Ecs => Scheme::Ecs,
            SchemeArg::EcsJacobi => Scheme::EcsJacobi,
            SchemeArg::Ics => Scheme::Ics,
        }),
        dt: c.dt,
        omega: if relaxation.is_some() { None } else { c.omega },
        relaxation,
        eps_rel: c.eps_rel,
        alpha: c.alpha,
        hbar: c.hbar,
        t_end: c.t_end,
    })?;
    Ok(s)
}

fn analyze(p: StabilityInputs) -> Result<()> {
    if !(p.tau1 > 0.0 && p.tau2 > 0.0 && p.hbar > 0.0 && p.dt > 0.0) {
        bail!("tau1, tau2, hbar and dt must be > 0");
    }
    let (wmax, wopt) = omega_bounds(&p);
    let (x1, x2) = ecs_characteristic_roots(&p);
    println!("r12,{}", r12(&p));
    println!("hbar_crit,{}", hbar_crit(p.dt, p.tau1, p.tau2));
    println!("omega_max,{wmax}");
    println!("omega_opt,{wopt}");
    println!("root1,{},{}", x1.re, x1.im);
    println!("root2,{},{}", x2.re, x2.im);
    println!("root_modulus,{}", x1.norm());
    Ok(())
}

fn run(common: &Common) -> Result<(), HarnessError> {
    let s = scenario(common)?;
    match harness::run(&s) {
        Ok(report) => {
            harness::write_report(&report, &common.out)?;
            let sm = &report.summary;
            println!(
                "{}: {} steps, {} iterations, t = {}, m1 = {:.3}, T1 = {:.3}",
                sm.name, sm.steps, sm.iterations, sm.t_final, sm.m1_final, sm.t1_final
            );
            Ok(())
        }
        Err(HarnessError::Coupling {
            step,
            t,
            source,
            partial,
        }) => {
            // Keep whatever was committed, including the failing trace.
            harness::write_report(&partial, &common.out)?;
            Err(HarnessError::Coupling {
                step,
                t,
                source,
                partial,
            })
        }
        Err(e) => Err(e),
    }
}

fn sweep(common: &Common, param: Param, values: &[f64]) -> Result<(), HarnessError> {
    let s = scenario(common)?;
    let p = match param {
        Param::Dt => SweepParameter::Dt,
        Param::Omega => SweepParameter::Omega,
        Param::Hbar => SweepParameter::Hbar,
    };
    let rows = harness::sweep(&s, p, values)?;
    let path = if common.out.extension().is_some() {
        common.out.clone()
    } else {
        common.out.join("sweep.csv")
    };
    harness::write_sweep(&rows, &path)?;
    println!("{} points written to {}", rows.len(), path.display());
    Ok(())
}

fn exit_code(e: &HarnessError) -> ExitCode {
    ExitCode::from(if e.is_non_convergence() {
        3
    } else if e.is_validation() {
        2
    } else {
        1
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run { common } => run(common),
        Command::Sweep { common, param, values } => sweep(common, *param, values),
        Command::Analyze { tau1, tau2, hbar, dt } => {
            return match analyze(StabilityInputs {
                tau1: *tau1,
                tau2: *tau2,
                hbar: *hbar,
                dt: *dt,
            }) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
            };
        }
        Command::Show { scenario } => load(scenario).and_then(|s| s.to_toml()).map(|t| print!("{t}")),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
