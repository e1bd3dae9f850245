//! Solver configuration: TOML (or JSON) sections with `SHOCKDEV_` environment
//! overrides and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eos::BarotropicEos;
use crate::error::{Error, Result};
use crate::free_boundary::{DevelopmentSettings, OuterOptions};
use crate::state_ahead::{
    synthesize_model, CoefficientOverride, CuspData, CuspParams, StateAheadModel,
};

/// Prefix of environment overrides: `SHOCKDEV_<SECTION>__<KEY>=<value>`.
pub const ENV_PREFIX: &str = "SHOCKDEV_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EosKind {
    #[default]
    Radiation,
    Poly2,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EosConfig {
    pub kind: EosKind,
    /// Coefficient of p = kρ² for `poly2`.
    pub k: Option<f64>,
    /// Two-column (ρ, p) file for `table`, relative to the config file.
    pub table: Option<PathBuf>,
    pub rho_ref: Option<f64>,
    pub h_ref: Option<f64>,
    /// Use closed forms where the built-in laws provide them.
    pub closed_forms: bool,
}

impl Default for EosConfig {
    fn default() -> Self {
        Self {
            kind: EosKind::Radiation,
            k: None,
            table: None,
            rho_ref: None,
            h_ref: None,
            closed_forms: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub degree: usize,
    pub overrides: Vec<CoefficientOverride>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            degree: 5,
            overrides: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub eps: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { eps: 0.01, n: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub tol_inner: f64,
    pub max_inner: usize,
    pub tol_outer: f64,
    pub max_outer: usize,
    pub max_retries: usize,
    /// Corner floor v_floor as a fraction of Δ.
    pub v_floor_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_inner: 1e-12,
            max_inner: 400,
            tol_outer: 1e-10,
            max_outer: 60,
            max_retries: 3,
            v_floor_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Default output directory when none is given on the command line.
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    /// Seed of the sampled property checks.
    pub seed: u64,
    /// Number of random states per sampled check.
    pub samples: usize,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            samples: 100,
        }
    }
}

/// Complete solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub eos: EosConfig,
    pub cusp: CuspParams,
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub solver: SolverOptions,
    pub output: OutputConfig,
    pub checks: ChecksConfig,
}

/// Input syntax of a configuration text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    fn detect(path: Option<&Path>, text: &str) -> Self {
        let by_ext = path.and_then(|p| p.extension()).and_then(|e| e.to_str());
        match by_ext {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            Some(e) if e.eq_ignore_ascii_case("toml") => Format::Toml,
            _ if text.trim_start().starts_with('{') => Format::Json,
            _ => Format::Toml,
        }
    }
}

fn parse_table(text: &str, format: Format) -> Result<toml::Table> {
    match format {
        Format::Toml => text
            .parse::<toml::Table>()
            .map_err(|e| Error::Config(e.to_string())),
        Format::Json => {
            let v: serde_json::Value =
                serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
            match toml::Value::try_from(v).map_err(|e| Error::Config(e.to_string()))? {
                toml::Value::Table(t) => Ok(t),
                _ => Err(Error::Config(
                    "top level of a JSON config must be an object".into(),
                )),
            }
        }
    }
}

/// Typed value of an override string: TOML literal if it parses, else a string.
fn override_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Apply `SHOCKDEV_<SECTION>__<KEY>` overrides to a raw table.
pub fn apply_overrides<I>(table: &mut toml::Table, vars: I) -> Result<()>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut vars: Vec<(String, String)> = vars
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    vars.sort();
    for (key, raw) in vars {
        let rest = &key[ENV_PREFIX.len()..];
        let (section, field) = rest.split_once("__").ok_or_else(|| {
            Error::Config(format!("{key}: expected {ENV_PREFIX}<SECTION>__<KEY>"))
        })?;
        let (section, field) = (section.to_ascii_lowercase(), field.to_ascii_lowercase());
        if section.is_empty() || field.is_empty() {
            return Err(Error::Config(format!("{key}: empty section or key")));
        }
        let entry = table
            .entry(section.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let sub = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("{key}: [{section}] is not a table")))?;
        sub.insert(field, override_value(&raw));
    }
    Ok(())
}

impl SolverConfig {
    /// Parse a configuration text with explicit overrides, then validate.
    pub fn from_text<I>(text: &str, format: Format, vars: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table = parse_table(text, format)?;
        apply_overrides(&mut table, vars)?;
        let cfg: SolverConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load from a file, applying overrides from the process environment.
    /// Relative table paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let format = Format::detect(Some(path), &text);
        let mut cfg = Self::from_text(&text, format, std::env::vars())?;
        if let (Some(t), Some(dir)) = (cfg.eos.table.as_mut(), path.parent()) {
            if t.is_relative() {
                *t = dir.join(&*t);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let g = &self.grid;
        if !(g.eps > 0.0 && g.eps <= 0.1) {
            return bad(format!("grid.eps must lie in (0, 0.1], got {}", g.eps));
        }
        if !(4..=4096).contains(&g.n) {
            return bad(format!("grid.n must lie in [4, 4096], got {}", g.n));
        }
        let s = &self.solver;
        for (name, tol) in [("tol_inner", s.tol_inner), ("tol_outer", s.tol_outer)] {
            if !(tol > f64::EPSILON && tol < 1.0) {
                return bad(format!(
                    "solver.{name} must lie in (machine epsilon, 1), got {tol}"
                ));
            }
        }
        if s.max_inner == 0 || s.max_outer == 0 {
            return bad("solver.max_inner and solver.max_outer must be positive".into());
        }
        if !(s.v_floor_fraction > 0.0 && s.v_floor_fraction <= 1.0) {
            return bad(format!(
                "solver.v_floor_fraction must lie in (0, 1], got {}",
                s.v_floor_fraction
            ));
        }
        let c = &self.cusp;
        for (name, x) in [("kappa", c.kappa), ("lambda", c.lambda), ("r0", c.r0)] {
            if !(x > 0.0 && x.is_finite()) {
                return bad(format!("cusp.{name} must be positive, got {x}"));
            }
        }
        for (name, x) in [
            ("alpha0", c.alpha0),
            ("beta0", c.beta0),
            ("alpha_ddot0", c.alpha_ddot0),
            ("dbeta_dt0", c.dbeta_dt0),
            ("xi", c.xi),
        ] {
            if !x.is_finite() {
                return bad(format!("cusp.{name} must be finite"));
            }
        }
        if !(4..=8).contains(&self.model.degree) {
            return bad(format!(
                "model.degree must lie in [4, 8], got {}",
                self.model.degree
            ));
        }
        match self.eos.kind {
            EosKind::Poly2 if !self.eos.k.is_some_and(|k| k > 0.0 && k.is_finite()) => {
                return bad("eos.k must be positive for poly2".into());
            }
            EosKind::Table if self.eos.table.is_none() => {
                return bad("eos.table is required for kind = table".into())
            }
            _ => {}
        }
        if self.checks.samples == 0 {
            return bad("checks.samples must be positive".into());
        }
        Ok(())
    }

    /// The configured equation of state. Failures are configuration errors.
    pub fn build_eos(&self) -> Result<BarotropicEos> {
        let e = &self.eos;
        let eos = match e.kind {
            EosKind::Radiation => BarotropicEos::radiation(),
            EosKind::Poly2 => BarotropicEos::poly2(e.k.unwrap_or(f64::NAN))?,
            EosKind::Table => {
                let path = e
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Config("eos.table missing".into()))?;
                BarotropicEos::read_table(path, e.rho_ref.unwrap_or(1.0), e.h_ref.unwrap_or(1.0))?
            }
        };
        let eos = if e.closed_forms {
            eos
        } else {
            eos.without_closed_forms()?
        };
        Ok(eos)
    }

    /// Resolved cusp data and the state-ahead model.
    pub fn build_model(&self, eos: &BarotropicEos) -> Result<StateAheadModel> {
        let cusp = CuspData::resolve(&self.cusp, eos)?;
        synthesize_model(cusp, eos, self.model.degree, &self.model.overrides)
    }

    pub fn development_settings(&self) -> DevelopmentSettings {
        let s = &self.solver;
        DevelopmentSettings {
            eps: self.grid.eps,
            n: self.grid.n,
            tol_inner: s.tol_inner,
            max_inner: s.max_inner,
            v_floor_fraction: s.v_floor_fraction,
            outer: OuterOptions {
                tol_outer: s.tol_outer,
                max_outer: s.max_outer,
                max_retries: s.max_retries,
            },
            perturbation: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Vec<(String, String)> {
        Vec::new()
    }

    #[test]
    fn empty_text_gives_canonical_defaults() {
        let cfg = SolverConfig::from_text("", Format::Toml, none()).unwrap();
        assert_eq!(cfg.grid, GridConfig { eps: 0.01, n: 64 });
        assert_eq!(cfg.eos.kind, EosKind::Radiation);
        assert_eq!(cfg.cusp, CuspParams::default());
    }

    #[test]
    fn env_overrides_are_typed() {
        let vars = vec![
            ("SHOCKDEV_GRID__N".to_string(), "128".to_string()),
            ("SHOCKDEV_EOS__KIND".to_string(), "poly2".to_string()),
            ("SHOCKDEV_EOS__K".to_string(), "0.5".to_string()),
            ("UNRELATED".to_string(), "x".to_string()),
        ];
        let cfg = SolverConfig::from_text("[grid]\nn = 32\n", Format::Toml, vars).unwrap();
        assert_eq!(cfg.grid.n, 128);
        assert_eq!(cfg.eos.kind, EosKind::Poly2);
        assert_eq!(cfg.eos.k, Some(0.5));
    }

    #[test]
    fn json_is_accepted() {
        let cfg =
            SolverConfig::from_text(r#"{"grid": {"eps": 0.005}}"#, Format::Json, none()).unwrap();
        assert_eq!(cfg.grid.eps, 0.005);
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "[grid]\neps = -1.0",
            "[grid]\nn = 2",
            "[cusp]\nkappa = 0.0",
            "[solver]\ntol_outer = 0.0",
            "[eos]\nkind = \"poly2\"",
            "[grid]\nunknown = 1",
            "not toml at all [",
        ] {
            assert!(
                matches!(
                    SolverConfig::from_text(text, Format::Toml, none()),
                    Err(Error::Config(_))
                ),
                "{text}"
            );
        }
    }
}
