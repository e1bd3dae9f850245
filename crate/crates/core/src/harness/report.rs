//! Diagnostics report: named checks grouped by acceptance criterion.

use serde::Serialize;

/// Where a target value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Closed-form asymptotic or thermodynamic value.
    Analytic,
    /// Independently computed reference (finite differences, fits, bisection).
    Oracle,
    /// Structural property such as a sign, bound or convergence order.
    Structural,
}

/// How `measured` is compared with `target` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |measured − target| ≤ tolerance·|target|.
    Relative,
    /// |measured − target| ≤ tolerance.
    Absolute,
    /// measured ≤ tolerance.
    AtMost,
    /// measured ≥ tolerance.
    AtLeast,
    /// measured is 1 for true, 0 for false.
    Flag,
}

/// One named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub basis: Basis,
    /// The formula or property the target expresses.
    pub anchor: String,
    pub target: Option<f64>,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    #[allow(clippy::too_many_arguments)]
    fn new(
        id: &str,
        description: &str,
        basis: Basis,
        anchor: &str,
        target: Option<f64>,
        measured: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let pass = match comparison {
            Comparison::Relative => {
                let t = target.unwrap_or(0.0);
                (measured - t).abs() <= tolerance * t.abs()
            }
            Comparison::Absolute => (measured - target.unwrap_or(0.0)).abs() <= tolerance,
            Comparison::AtMost => measured <= tolerance,
            Comparison::AtLeast => measured >= tolerance,
            Comparison::Flag => measured == 1.0,
        };
        Self {
            id: id.into(),
            description: description.into(),
            basis,
            anchor: anchor.into(),
            target,
            measured,
            tolerance,
            comparison,
            pass: pass && measured.is_finite(),
            note: None,
        }
    }

    pub fn relative(
        id: &str,
        description: &str,
        basis: Basis,
        anchor: &str,
        target: f64,
        measured: f64,
        tol: f64,
    ) -> Self {
        Self::new(
            id,
            description,
            basis,
            anchor,
            Some(target),
            measured,
            tol,
            Comparison::Relative,
        )
    }

    pub fn absolute(
        id: &str,
        description: &str,
        basis: Basis,
        anchor: &str,
        target: f64,
        measured: f64,
        tol: f64,
    ) -> Self {
        Self::new(
            id,
            description,
            basis,
            anchor,
            Some(target),
            measured,
            tol,
            Comparison::Absolute,
        )
    }

    pub fn at_most(
        id: &str,
        description: &str,
        basis: Basis,
        anchor: &str,
        measured: f64,
        bound: f64,
    ) -> Self {
        Self::new(
            id,
            description,
            basis,
            anchor,
            None,
            measured,
            bound,
            Comparison::AtMost,
        )
    }

    pub fn at_least(
        id: &str,
        description: &str,
        basis: Basis,
        anchor: &str,
        measured: f64,
        bound: f64,
    ) -> Self {
        Self::new(
            id,
            description,
            basis,
            anchor,
            None,
            measured,
            bound,
            Comparison::AtLeast,
        )
    }

    pub fn flag(id: &str, description: &str, basis: Basis, anchor: &str, ok: bool) -> Self {
        Self::new(
            id,
            description,
            basis,
            anchor,
            None,
            if ok { 1.0 } else { 0.0 },
            0.0,
            Comparison::Flag,
        )
    }

    /// A check that could not be evaluated; always fails.
    pub fn failed(id: &str, description: &str, reason: impl Into<String>) -> Self {
        let mut c = Self::new(
            id,
            description,
            Basis::Structural,
            "evaluation",
            None,
            f64::NAN,
            0.0,
            Comparison::Flag,
        );
        c.note = Some(reason.into());
        c
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A group of checks under one acceptance criterion or property suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: String,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn new(id: &str, title: &str, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self {
            id: id.into(),
            title: title.into(),
            pass,
            checks,
        }
    }

    /// One summary line: `criterion <id> PASS|FAIL <title> (<k>/<n> checks)`.
    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.pass).count();
        format!(
            "criterion {:>2} {} {} ({}/{} checks)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            ok,
            self.checks.len()
        )
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Convergence histories of the main solve.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Histories {
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    pub inner_ratio: f64,
    pub outer_ratio: f64,
}

/// Summary of the main solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub eps_requested: f64,
    pub eps_used: f64,
    pub failed_eps: Vec<f64>,
    pub n: usize,
    pub outer_iterations: usize,
    pub identification_crosscheck: f64,
}

/// The full diagnostics report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: String,
    pub eos: String,
    pub pass: bool,
    pub criteria: Vec<Criterion>,
    /// Additional property suites not tied to a numbered criterion.
    pub suites: Vec<Criterion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histories: Option<Histories>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(mode: &str, eos: &str, criteria: Vec<Criterion>, suites: Vec<Criterion>) -> Self {
        let pass = criteria.iter().chain(&suites).all(|c| c.pass);
        Self {
            mode: mode.into(),
            eos: eos.into(),
            pass,
            criteria,
            suites,
            solve: None,
            histories: None,
            error: None,
        }
    }

    pub fn recompute_pass(&mut self) {
        self.pass =
            self.error.is_none() && self.criteria.iter().chain(&self.suites).all(|c| c.pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .chain(&self.suites)
            .map(Criterion::summary_line)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Check::relative("a", "", Basis::Analytic, "", 2.0, 2.1, 0.06).pass);
        assert!(!Check::relative("a", "", Basis::Analytic, "", 2.0, 2.2, 0.06).pass);
        assert!(Check::absolute("a", "", Basis::Analytic, "", -1.0, -1.01, 0.02).pass);
        assert!(Check::at_most("a", "", Basis::Structural, "", 1e-12, 1e-10).pass);
        assert!(!Check::at_least("a", "", Basis::Structural, "", 1.5, 1.8).pass);
        assert!(!Check::at_most("a", "", Basis::Structural, "", f64::NAN, 1.0).pass);
        assert!(!Check::failed("a", "", "boom").pass);
    }

    #[test]
    fn empty_criterion_fails() {
        assert!(!Criterion::new("1", "t", vec![]).pass);
    }
}
