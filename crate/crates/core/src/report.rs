//! Check reports: JSON and fixed-width text renderings of one run.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// One named check. `pass` is `None` when the check was skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity or condition being checked, as a formula.
    #[serde(rename = "paper_ref")]
    pub formula: String,
    /// `None` for boolean checks, skipped checks and non-finite residuals.
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes iff `residual` is finite and below `tol`.
    pub fn residual(name: impl Into<String>, formula: impl Into<String>, residual: f64, tol: f64) -> Self {
        let finite = residual.is_finite();
        Self {
            name: name.into(),
            formula: formula.into(),
            max_residual: finite.then_some(residual),
            tolerance: Some(tol),
            pass: Some(finite && residual < tol),
            detail: (!finite).then(|| format!("non-finite residual ({residual})")),
        }
    }

    pub fn boolean(name: impl Into<String>, formula: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            formula: formula.into(),
            max_residual: None,
            tolerance: None,
            pass: Some(pass),
            detail: Some(detail.into()),
        }
    }

    pub fn skipped(name: impl Into<String>, formula: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            formula: formula.into(),
            max_residual: None,
            tolerance: None,
            pass: None,
            detail: Some(reason.into()),
        }
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub manifold: Value,
    pub config: Value,
    pub checks: Vec<Check>,
    pub verdicts: Map<String, Value>,
    pub coverage_flags: Map<String, Value>,
    /// Set when independent formulations disagree.
    pub engine_fault: bool,
    pub diagnostics: Vec<String>,
    pub passed: bool,
}

impl CheckReport {
    /// 0 when every check passed, 1 on a failed check, 3 on an engine fault.
    pub fn exit_code(&self) -> i32 {
        if self.engine_fault {
            3
        } else if self.passed {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, k: &str, v: &Value| {
            let _ = writeln!(out, "  {k:<36} {}", plain(v));
        };
        out.push_str("MANIFOLD\n");
        if let Value::Object(m) = &self.manifold {
            for (k, v) in m {
                line(&mut out, k, v);
            }
        }
        out.push_str("CONFIG\n");
        if let Value::Object(m) = &self.config {
            for (k, v) in m {
                line(&mut out, k, v);
            }
        }
        let _ = writeln!(out, "CHECKS\n  {:<44} {:>12} {:>10}  {:<6} DETAIL", "NAME", "MAX RESIDUAL", "TOL", "RESULT");
        for c in &self.checks {
            let residual = c.max_residual.map_or("-".to_string(), |v| format!("{v:.3e}"));
            let tol = c.tolerance.map_or("-".to_string(), |v| format!("{v:.0e}"));
            let result = match c.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "SKIP",
            };
            let _ = writeln!(
                out,
                "  {:<44} {:>12} {:>10}  {:<6} {}",
                c.name,
                residual,
                tol,
                result,
                c.detail.as_deref().unwrap_or("")
            );
        }
        out.push_str("VERDICTS\n");
        for (k, v) in &self.verdicts {
            line(&mut out, k, v);
        }
        out.push_str("COVERAGE\n");
        for (k, v) in &self.coverage_flags {
            line(&mut out, k, v);
        }
        if !self.diagnostics.is_empty() {
            out.push_str("DIAGNOSTICS\n");
            for d in &self.diagnostics {
                let _ = writeln!(out, "  {d}");
            }
        }
        let status = if self.engine_fault {
            "ENGINE FAULT"
        } else if self.passed {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(out, "RESULT {status}");
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
