//! Configuration, oracles, acceptance checks and the run, verify and sweep drivers.

pub mod checks;
pub mod config;
pub mod fit;
pub mod report;

use std::path::Path;
use std::thread;

use serde::Serialize;

use crate::error::Result;
use crate::fixed_bvp::characteristic_residuals;
use crate::free_boundary::run_shock_development;
use crate::state_ahead::ValidityBox;

use self::checks::SolveSet;
use self::config::SolverConfig;
use self::report::{Histories, Report, SolveSummary};

/// Report and artifact texts of a full run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    /// Grid CSV of the main solve, when it converged.
    pub grid_csv: Option<String>,
    /// Shock-curve CSV of the main solve, when it converged.
    pub shock_csv: Option<String>,
    /// Coefficient dump of the state-ahead model.
    pub model_json: String,
}

impl RunOutcome {
    /// Write report.json, model.json and, when present, grid.csv and shock.csv.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.report.to_json())?;
        std::fs::write(dir.join("model.json"), &self.model_json)?;
        if let Some(g) = &self.grid_csv {
            std::fs::write(dir.join("grid.csv"), g)?;
        }
        if let Some(s) = &self.shock_csv {
            std::fs::write(dir.join("shock.csv"), s)?;
        }
        Ok(())
    }
}

/// Solve and evaluate every acceptance criterion and property suite.
///
/// Errors are returned only for an unusable configuration; solver failures
/// are recorded in the report.
pub fn run_all(cfg: &SolverConfig) -> Result<RunOutcome> {
    let eos = cfg.build_eos()?;
    let model = cfg.build_model(&eos)?;
    let settings = cfg.development_settings();
    let cusp = model.cusp;
    let base = cusp.base();

    let set = SolveSet::run(&eos, &model, &settings);
    let criteria = vec![
        checks::criterion_1(&eos),
        checks::criterion_2(&eos, base),
        checks::criterion_3(&eos, base, &set.main),
        checks::criterion_4(&set, &cusp),
        checks::criterion_5(&set, &cusp),
        checks::criterion_6(&set, &cusp),
        checks::criterion_7(&set),
        checks::criterion_8(&set, &eos, &cusp),
        checks::criterion_9(&set),
        checks::criterion_10(&set),
    ];
    let suites = suites(cfg, &eos, &model);
    let mut report = Report::new("run", eos.label(), criteria, suites);

    let eps_used = set.main.as_ref().map_or(settings.eps, |s| s.eps);
    let model_json = serde_json::to_string_pretty(
        &model
            .clone()
            .with_validity(ValidityBox::for_eps(eps_used))
            .to_json(),
    )
    .expect("model serialises");
    let (grid_csv, shock_csv) = match &set.main {
        Ok(sol) => {
            report.solve = Some(SolveSummary {
                eps_requested: settings.eps,
                eps_used: sol.eps,
                failed_eps: sol.failed_eps.clone(),
                n: settings.n,
                outer_iterations: sol.outer_history.len(),
                identification_crosscheck: sol.identification_crosscheck,
            });
            report.histories = Some(Histories {
                outer: sol.outer_history.clone(),
                inner: sol.inner_history.clone(),
                inner_ratio: sol.inner_ratio,
                outer_ratio: sol.outer_ratio,
            });
            (Some(sol.field.to_csv()), Some(sol.curve.to_csv()))
        }
        Err(e) => {
            report.error = Some(e.to_string());
            if let crate::error::Error::NonConvergence {
                history,
                last_ratio,
                ..
            } = e
            {
                report.histories = Some(Histories {
                    outer: history.clone(),
                    inner: Vec::new(),
                    inner_ratio: f64::NAN,
                    outer_ratio: *last_ratio,
                });
            }
            (None, None)
        }
    };
    report.recompute_pass();
    Ok(RunOutcome {
        report,
        grid_csv,
        shock_csv,
        model_json,
    })
}

fn suites(
    cfg: &SolverConfig,
    eos: &crate::eos::BarotropicEos,
    model: &crate::state_ahead::StateAheadModel,
) -> Vec<report::Criterion> {
    let (seed, samples) = (cfg.checks.seed, cfg.checks.samples);
    vec![
        checks::suite_state(eos, seed, samples),
        checks::suite_jump(eos, seed, samples),
        checks::suite_state_ahead(eos, model, cfg.grid.eps),
    ]
}

/// Pointwise criteria and property suites without the characteristic solve.
pub fn verify(cfg: &SolverConfig) -> Result<Report> {
    let eos = cfg.build_eos()?;
    let model = cfg.build_model(&eos)?;
    let base = model.cusp.base();
    let criteria = vec![checks::criterion_1(&eos), checks::criterion_2(&eos, base)];
    let mut report = Report::new("verify", eos.label(), criteria, suites(cfg, &eos, &model));
    report.recompute_pass();
    Ok(report)
}

/// Parameter swept by [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Eps(Vec<f64>),
    N(Vec<usize>),
}

/// One solve of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub n: usize,
    pub eps_used: Option<f64>,
    pub residual: Option<f64>,
    pub inner_ratio: Option<f64>,
    pub outer_ratio: Option<f64>,
    pub outer_iterations: Option<usize>,
    /// Observed order of the residual against the previous row, in Δ.
    pub residual_order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Results of a sweep, in the order given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_text(&self) -> String {
        let mut out = String::from(
            "eps        n     eps_used   residual   order  inner_ratio  outer_ratio  outer_its\n",
        );
        let opt =
            |x: Option<f64>, w: usize| x.map_or(format!("{:>w$}", "-"), |v| format!("{v:>w$.3e}"));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<10.3e} {:<5} {} {} {} {} {} {:>9}",
                r.eps,
                r.n,
                opt(r.eps_used, 10),
                opt(r.residual, 10),
                r.residual_order
                    .map_or(format!("{:>6}", "-"), |v| format!("{v:>6.3}")),
                opt(r.inner_ratio, 12),
                opt(r.outer_ratio, 12),
                r.outer_iterations
                    .map_or("-".to_string(), |k| k.to_string()),
            ));
            if let Some(e) = &r.error {
                out.push_str(&format!("  error: {e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serialises")
    }
}

/// Rerun the solver across ε or n values, concurrently.
pub fn sweep(cfg: &SolverConfig, axis: &SweepAxis) -> Result<SweepTable> {
    let eos = cfg.build_eos()?;
    let model = cfg.build_model(&eos)?;
    let base = cfg.development_settings();
    let settings: Vec<_> = match axis {
        SweepAxis::Eps(list) => list
            .iter()
            .map(|&eps| crate::free_boundary::DevelopmentSettings { eps, ..base })
            .collect(),
        SweepAxis::N(list) => list
            .iter()
            .map(|&n| crate::free_boundary::DevelopmentSettings { n, ..base })
            .collect(),
    };
    for s in &settings {
        let mut c = cfg.clone();
        c.grid.eps = s.eps;
        c.grid.n = s.n;
        c.validate()?;
    }
    let mut rows: Vec<SweepRow> = thread::scope(|scope| {
        let handles: Vec<_> = settings
            .iter()
            .map(|st| {
                let (eos, model) = (&eos, &model);
                scope.spawn(move || {
                    let mut row = SweepRow {
                        eps: st.eps,
                        n: st.n,
                        eps_used: None,
                        residual: None,
                        inner_ratio: None,
                        outer_ratio: None,
                        outer_iterations: None,
                        residual_order: None,
                        error: None,
                    };
                    let solved = run_shock_development(eos, model, st).and_then(|sol| {
                        let res = characteristic_residuals(&sol.field, eos, &model.cusp)?.max();
                        Ok((sol, res))
                    });
                    match solved {
                        Ok((sol, res)) => {
                            row.eps_used = Some(sol.eps);
                            row.residual = Some(res);
                            row.inner_ratio = Some(sol.inner_ratio);
                            row.outer_ratio = Some(sol.outer_ratio);
                            row.outer_iterations = Some(sol.outer_history.len());
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                    row
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep thread panicked"))
            .collect()
    });
    for k in 1..rows.len() {
        let (prev, cur) = (&rows[k - 1], &rows[k]);
        if let (Some(a), Some(b), Some(ea), Some(eb)) =
            (prev.residual, cur.residual, prev.eps_used, cur.eps_used)
        {
            let (da, db) = (ea / prev.n as f64, eb / cur.n as f64);
            if da != db {
                rows[k].residual_order = Some((a / b).ln() / (da / db).ln());
            }
        }
    }
    Ok(SweepTable { rows })
}
