//! Machine-readable run reports.

use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: &str = "plap-report/1";

/// A reported number and where its uncertainty comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub value: f64,
    /// Monte Carlo standard error; absent for deterministic values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// Set when the value is deterministic (no sampling error).
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
}

impl Record {
    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            stderr: None,
            exact: true,
        }
    }

    pub fn sampled(name: impl Into<String>, value: f64, stderr: f64) -> Self {
        Self {
            name: name.into(),
            value,
            stderr: Some(stderr),
            exact: false,
        }
    }
}

/// How the acceptance bound of a [`Check`] was formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tolerance {
    /// `|value − reference| ≤ tol`.
    Absolute { tol: f64 },
    /// `|value − reference| ≤ tol·|reference|`.
    Relative { tol: f64 },
    /// `|value − reference| ≤ n_sigma·stderr`.
    Sigma { n_sigma: f64 },
    /// `|value − reference| ≤ n_sigma·stderr + tol·|reference|`.
    SigmaPlusRelative { n_sigma: f64, tol: f64 },
}

/// A pass/fail comparison that can be re-checked from the report alone:
/// `pass == (|value − reference| ≤ bound)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub tolerance: Tolerance,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, reference: f64, stderr: Option<f64>, tolerance: Tolerance) -> Self {
        let se = stderr.unwrap_or(0.0);
        let bound = match tolerance {
            Tolerance::Absolute { tol } => tol,
            Tolerance::Relative { tol } => tol * reference.abs(),
            Tolerance::Sigma { n_sigma } => n_sigma * se,
            Tolerance::SigmaPlusRelative { n_sigma, tol } => n_sigma * se + tol * reference.abs(),
        };
        let pass = (value - reference).abs() <= bound;
        Self {
            name: name.into(),
            value,
            reference,
            stderr,
            tolerance,
            bound,
            pass,
        }
    }

    /// `value ≤ bound`, for maxima of nonnegative residuals.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value, 0.0, None, Tolerance::Absolute { tol })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub duration_ms: u64,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            records: Vec::new(),
            checks: Vec::new(),
            pass: true,
            duration_ms: 0,
        }
    }

    pub fn record(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Sets `pass` from the checks; a report without checks passes.
    pub fn finish(&mut self, duration_ms: u64) {
        self.pass = self.checks.iter().all(|c| c.pass);
        self.duration_ms = duration_ms;
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// One row per record and per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,name,value,stderr,reference,bound,pass\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.records {
            let se = if r.exact { "exact".to_string() } else { opt(r.stderr) };
            out.push_str(&format!("record,{},{:e},{},,,\n", r.name, r.value, se));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check,{},{:e},{},{:e},{:e},{}\n",
                c.name,
                c.value,
                opt(c.stderr),
                c.reference,
                c.bound,
                c.pass
            ));
        }
        out
    }
}
