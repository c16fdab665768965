//! Pass/fail reports with per-condition residuals.

use std::fmt::Write as _;

use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub tag: String,
    pub location: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub tag: String,
    pub location: String,
    pub residual: f64,
    pub detail: Option<String>,
}

/// Outcome of a validation or verification run. It passes exactly when no
/// violation was recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub title: String,
    pub tol: f64,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(title: impl Into<String>, tol: f64) -> Self {
        Self {
            title: title.into(),
            tol,
            seed: None,
            checks: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records a residual; a NaN residual or one above `threshold` is a
    /// violation.
    pub fn record(
        &mut self,
        tag: &str,
        location: impl Into<String>,
        residual: f64,
        threshold: f64,
    ) -> bool {
        self.record_with(tag, location, residual, threshold, None)
    }

    pub fn record_with(
        &mut self,
        tag: &str,
        location: impl Into<String>,
        residual: f64,
        threshold: f64,
        detail: Option<String>,
    ) -> bool {
        self.record_verdict(tag, location, residual, threshold, residual <= threshold, detail)
    }

    /// Records a check whose verdict is decided by the caller.
    pub fn record_verdict(
        &mut self,
        tag: &str,
        location: impl Into<String>,
        residual: f64,
        threshold: f64,
        ok: bool,
        detail: Option<String>,
    ) -> bool {
        let location = location.into();
        if !ok {
            self.violations.push(Violation {
                tag: tag.to_string(),
                location: location.clone(),
                residual,
                detail: detail.clone(),
            });
        }
        self.checks.push(Check {
            tag: tag.to_string(),
            location,
            residual,
            threshold,
            passed: ok,
            detail,
        });
        ok
    }

    /// Records an unconditional failure (no meaningful residual).
    pub fn fail(&mut self, tag: &str, location: impl Into<String>, detail: impl Into<String>) {
        self.record_with(tag, location, f64::INFINITY, self.tol, Some(detail.into()));
    }

    /// Appends the checks and violations of `other`, prefixing locations.
    pub fn merge(&mut self, other: ValidationReport, prefix: &str) {
        let pre = |loc: String| {
            if prefix.is_empty() {
                loc
            } else if loc.is_empty() {
                prefix.to_string()
            } else {
                format!("{prefix} {loc}")
            }
        };
        for c in other.checks {
            self.checks.push(Check {
                location: pre(c.location),
                ..c
            });
        }
        for v in other.violations {
            self.violations.push(Violation {
                location: pre(v.location),
                ..v
            });
        }
    }

    /// Largest finite or infinite residual among checks whose tag starts
    /// with `prefix`.
    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.tag.starts_with(prefix))
            .map(|c| if c.residual.is_nan() { f64::INFINITY } else { c.residual })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "tag": c.tag,
                    "location": c.location,
                    "residual": num(c.residual),
                    "threshold": num(c.threshold),
                    "passed": c.passed,
                });
                if let Some(d) = &c.detail {
                    v["detail"] = json!(d);
                }
                v
            })
            .collect();
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|x| {
                let mut v = json!({
                    "tag": x.tag,
                    "location": x.location,
                    "residual": num(x.residual),
                });
                if let Some(d) = &x.detail {
                    v["detail"] = json!(d);
                }
                v
            })
            .collect();
        json!({
            "title": self.title,
            "passed": self.passed(),
            "tol": self.tol,
            "seed": self.seed,
            "checks": checks,
            "violations": violations,
        })
    }

    /// Human-readable summary: one line per tag with the worst residual,
    /// then one line per violation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {verdict}", self.title);
        let _ = write!(out, "  tol: {:e}", self.tol);
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "  seed: {s}");
            }
            None => {
                let _ = writeln!(out, "  seed: none");
            }
        }
        let mut tags: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !tags.contains(&c.tag.as_str()) {
                tags.push(&c.tag);
            }
        }
        for tag in tags {
            let count = self.checks.iter().filter(|c| c.tag == tag).count();
            let failed = self.violations.iter().filter(|v| v.tag == tag).count();
            let worst = self
                .checks
                .iter()
                .filter(|c| c.tag == tag)
                .map(|c| c.residual)
                .fold(0.0, f64::max);
            let _ = writeln!(
                out,
                "  {tag}: {count} checks, {failed} failed, max residual {worst:.3e}"
            );
        }
        for v in &self.violations {
            let _ = write!(out, "  violation {} at {}: residual {:.3e}", v.tag, v.location, v.residual);
            if let Some(d) = &v.detail {
                let _ = write!(out, " ({d})");
            }
            let _ = writeln!(out);
        }
        out
    }
}
