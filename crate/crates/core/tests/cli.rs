use std::fs;
use std::process::{Command, Output};

fn lpcosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpcosim"))
        .args(args)
        .env_remove("LPCOSIM_OUT")
        .output()
        .expect("binary runs")
}

fn header(path: &std::path::Path) -> String {
    fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .next()
        .unwrap_or_default()
        .to_string()
}

#[test]
fn run_writes_all_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lpcosim(&["run", "--scenario", "events", "--scheme", "ics", "--dt", "100", "--t-end", "2000", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = dir.path();
    assert_eq!(header(&p.join("series.csv")), "t,T1,T2,T21,phi12,m2,state2,iters");
    assert_eq!(header(&p.join("events.csv")), "transition,t_star");
    assert_eq!(
        header(&p.join("ledger.csv")),
        "step,t,dE_local,dE_cumulative,eps_local,eps_cumulative"
    );
    assert_eq!(header(&p.join("trace.csv")), "step,k,t_candidate,residual_norm,omega,event_time");
    assert!(p.join("summary.csv").exists());
    let events = fs::read_to_string(p.join("events.csv")).unwrap();
    assert!(events.lines().nth(1).unwrap().starts_with("Heating->Melting,1583."), "{events}");
}

#[test]
fn toy_scenario_has_no_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lpcosim(&["run", "--scenario", "stability-ecs", "--t-end", "500", "--out", out]);
    assert!(o.status.success());
    assert!(dir.path().join("series.csv").exists());
    assert!(!dir.path().join("ledger.csv").exists());
}

#[test]
fn invalid_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\n[coupling]\nscheme = \"ics\"\n").unwrap();
    let o = lpcosim(&["run", "--scenario", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = lpcosim(&["run", "--scenario", "no-such-scenario"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("built-in scenarios"));

    let o = lpcosim(&["run", "--scenario", "events", "--dt", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn over_relaxation_exits_3_and_keeps_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lpcosim(&["run", "--scenario", "stability-ics", "--omega", "1.1", "--t-end", "200", "--out", out]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.lines().count() > 100);
}

#[test]
fn analyze_prints_reference_values() {
    let o = lpcosim(&["analyze"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key},")))
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| panic!("{key} missing in {text}"))
    };
    assert!((value("r12") - 0.94).abs() < 1e-9);
    assert!((value("omega_max") - 1.031).abs() < 1e-3);
    assert!((value("hbar_crit") - 1.702).abs() < 1e-3);

    assert_eq!(lpcosim(&["analyze", "--dt", "0"]).status.code(), Some(2));
}

#[test]
fn show_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpcosim(&["show", "--scenario", "lp-physical"]);
    assert!(o.status.success());
    let path = dir.path().join("lp.toml");
    fs::write(&path, &o.stdout).unwrap();
    let out = dir.path().join("out");
    let o = lpcosim(&[
        "run",
        "--scenario",
        path.to_str().unwrap(),
        "--t-end",
        "300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("omega.csv");
    let o = lpcosim(&[
        "sweep",
        "--scenario",
        "stability-ics",
        "--t-end",
        "200",
        "--param",
        "omega",
        "--values",
        "0.5,0.9,1.1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 4);
}
