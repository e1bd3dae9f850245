use shockdev::harness::config::{Format, SolverConfig};
use shockdev::harness::report::Basis;
use shockdev::harness::{run_all, verify};

fn small() -> SolverConfig {
    SolverConfig::from_text("[grid]\nn = 16\n", Format::Toml, Vec::new()).unwrap()
}

#[test]
fn reports_are_bit_identical_across_runs() {
    let cfg = small();
    let (a, b) = (run_all(&cfg).unwrap(), run_all(&cfg).unwrap());
    assert_eq!(a.report.to_json(), b.report.to_json());
    assert_eq!(a.grid_csv, b.grid_csv);
    assert_eq!(a.shock_csv, b.shock_csv);
    assert_eq!(a.model_json, b.model_json);
}

#[test]
fn every_check_names_its_basis_and_anchor() {
    let report = verify(&small()).unwrap();
    let checks: Vec<_> = report
        .criteria
        .iter()
        .chain(&report.suites)
        .flat_map(|c| &c.checks)
        .collect();
    assert!(!checks.is_empty());
    assert!(checks.iter().any(|c| c.basis == Basis::Analytic));
    assert!(checks
        .iter()
        .all(|c| !c.anchor.is_empty() && !c.id.is_empty()));
    assert!(report.pass);
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    run_all(&small()).unwrap().write(dir.path()).unwrap();
    let grid = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    // One header plus the (n + 1)(n + 2)/2 nodes of the triangle.
    assert_eq!(grid.lines().count(), 1 + 17 * 18 / 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["mode"], "run");
}
