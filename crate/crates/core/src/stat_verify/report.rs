use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Check,
    /// A deliberately mismatched pair; the criterion is expected to fail.
    NegativeControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub role: Role,
    pub estimate: f64,
    pub standard_error: Option<f64>,
    pub target: Option<f64>,
    /// Pass iff `|estimate − target| ≤ tolerance`.
    pub tolerance: Option<f64>,
    /// Pass iff `p_value ≥ significance`.
    pub significance: Option<f64>,
    pub p_value: Option<f64>,
    pub sample_size: usize,
    pub passed: bool,
    pub skipped: bool,
    pub runtime_seconds: f64,
    pub detail: String,
}

impl VerificationReport {
    fn base(name: &str, role: Role, estimate: f64, sample_size: usize) -> Self {
        Self {
            name: name.to_string(),
            role,
            estimate,
            standard_error: None,
            target: None,
            tolerance: None,
            significance: None,
            p_value: None,
            sample_size,
            passed: false,
            skipped: false,
            runtime_seconds: 0.0,
            detail: String::new(),
        }
    }

    pub fn tolerance(
        name: &str,
        role: Role,
        estimate: f64,
        standard_error: Option<f64>,
        target: f64,
        tolerance: f64,
        sample_size: usize,
    ) -> Self {
        let mut r = Self::base(name, role, estimate, sample_size);
        r.standard_error = standard_error;
        r.target = Some(target);
        r.tolerance = Some(tolerance);
        r.passed = (estimate - target).abs() <= tolerance;
        r
    }

    /// `estimate` is the test statistic; `p_value` the (possibly adjusted)
    /// p-value compared against `significance`.
    pub fn significance(name: &str, role: Role, estimate: f64, p_value: f64, significance: f64, sample_size: usize) -> Self {
        let mut r = Self::base(name, role, estimate, sample_size);
        r.p_value = Some(p_value);
        r.significance = Some(significance);
        r.passed = p_value >= significance;
        r
    }

    /// A compound criterion evaluated by the caller.
    pub fn flag(name: &str, role: Role, estimate: f64, passed: bool, sample_size: usize) -> Self {
        let mut r = Self::base(name, role, estimate, sample_size);
        r.passed = passed;
        r
    }

    pub fn skipped(name: &str, role: Role, reason: impl Into<String>) -> Self {
        let mut r = Self::base(name, role, f64::NAN, 0);
        r.skipped = true;
        r.detail = reason.into();
        r
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_seconds = start.elapsed().as_secs_f64();
        self
    }

    /// As expected: checks pass, negative controls fail, skips are neutral.
    pub fn as_expected(&self) -> bool {
        self.skipped
            || match self.role {
                Role::Check => self.passed,
                Role::NegativeControl => !self.passed,
            }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4e}"))
}

/// Fixed-width table of reports.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<40} {:<8} {:>12} {:>11} {:>11} {:>11} {:>7} {:>8} {:>7}",
        "check", "role", "estimate", "std.err", "tol", "p", "n", "time[s]", "result"
    );
    for r in reports {
        let result = if r.skipped {
            "skip"
        } else if r.passed {
            "pass"
        } else {
            "fail"
        };
        let role = match r.role {
            Role::Check => "check",
            Role::NegativeControl => "control",
        };
        let _ = writeln!(
            s,
            "{:<40} {:<8} {:>12.5e} {:>11} {:>11} {:>11} {:>7} {:>8.2} {:>7}",
            r.name,
            role,
            r.estimate,
            opt(r.standard_error),
            opt(r.tolerance),
            opt(r.p_value),
            r.sample_size,
            r.runtime_seconds,
            result
        );
    }
    s
}
