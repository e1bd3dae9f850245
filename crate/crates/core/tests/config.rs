use std::path::{Path, PathBuf};

use shockdev::harness::config::{EosKind, Format, SolverConfig};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn bundled_configs_load_and_build() {
    for name in [
        "canonical.toml",
        "moving_cusp.toml",
        "poly2.toml",
        "table.toml",
    ] {
        let cfg = SolverConfig::load(&configs().join(name)).unwrap();
        let eos = cfg.build_eos().unwrap();
        cfg.build_model(&eos).unwrap();
    }
}

#[test]
fn table_path_resolves_against_the_config_file() {
    let cfg = SolverConfig::load(&configs().join("table.toml")).unwrap();
    assert_eq!(cfg.eos.kind, EosKind::Table);
    assert!(cfg.eos.table.unwrap().is_file());
}

#[test]
fn json_file_matches_its_toml_twin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"grid": {"eps": 0.005, "n": 32}, "cusp": {"kappa": 2.0}}"#,
    )
    .unwrap();
    let from_json = SolverConfig::load(&path).unwrap();
    let toml = "[grid]\neps = 0.005\nn = 32\n[cusp]\nkappa = 2.0\n";
    let from_toml = SolverConfig::from_text(toml, Format::Toml, Vec::new()).unwrap();
    assert_eq!(from_json, from_toml);
}

#[test]
fn environment_overrides_take_precedence() {
    let vars = vec![
        ("SHOCKDEV_GRID__N".to_string(), "128".to_string()),
        ("SHOCKDEV_EOS__KIND".to_string(), "poly2".to_string()),
        ("SHOCKDEV_EOS__K".to_string(), "0.5".to_string()),
        ("UNRELATED".to_string(), "1".to_string()),
    ];
    let cfg = SolverConfig::from_text("[grid]\nn = 16\n", Format::Toml, vars).unwrap();
    assert_eq!(cfg.grid.n, 128);
    assert_eq!(cfg.eos.kind, EosKind::Poly2);
}

#[test]
fn invalid_configs_are_rejected() {
    for text in [
        "[grid]\neps = 0.5\n",
        "[grid]\nn = 2\n",
        "[grid]\nsize = 3\n",
        "[cusp]\nlambda = -1.0\n",
        "[eos]\nkind = \"table\"\n",
        "[model]\ndegree = 12\n",
        "[solver]\ntol_outer = 0.0\n",
    ] {
        assert!(
            SolverConfig::from_text(text, Format::Toml, Vec::new()).is_err(),
            "{text}"
        );
    }
    assert!(SolverConfig::load(Path::new("/nonexistent/config.toml")).is_err());
}
