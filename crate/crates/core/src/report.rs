//! The JSON envelope every command emits.
//!
//! Field order is fixed by the struct layout and maps are ordered, so equal
//! inputs produce byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::grid::PointError;

pub const TOOL: &str = "minigraph";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever `docs/report.schema.json` changes shape.
pub const SCHEMA_VERSION: u32 = 1;
/// No command draws random numbers; the seed is recorded so that reports
/// stay comparable if one ever does.
pub const RUN_SEED: u64 = 0;

/// A named quantity compared against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// Passes when `value < tolerance`.
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            pass: value < tolerance,
        }
    }

    /// A yes/no condition, recorded as `1` or `0`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: None,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    pub seed: u64,
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub verdict: String,
    pub success: bool,
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
    pub notes: Vec<String>,
    pub errors: Vec<PointError>,
}

impl AnalysisReport {
    pub fn new(command: &str, argv: &[String]) -> Self {
        AnalysisReport {
            tool: TOOL,
            version: VERSION,
            schema_version: SCHEMA_VERSION,
            seed: RUN_SEED,
            command: command.to_string(),
            argv: argv.to_vec(),
            inputs: BTreeMap::new(),
            verdict: String::new(),
            success: false,
            checks: Vec::new(),
            details: serde_json::Value::Null,
            notes: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Pretty-printed JSON with a trailing newline. Non-finite numbers
    /// become `null`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Serialize any module report into the `details` slot.
pub fn details<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("details serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks() {
        assert!(Check::below("r", 1e-12, 1e-9).pass);
        assert!(!Check::below("r", 1e-9, 1e-9).pass);
        assert!(!Check::below("r", f64::NAN, 1e-9).pass);
        let c = Check::holds("ok", false);
        assert_eq!((c.value, c.pass, c.tolerance), (0.0, false, None));
    }

    #[test]
    fn stable_layout() {
        let mut r = AnalysisReport::new("verify", &["--f1".into(), "x".into()]);
        r.input("f2", "y").input("f1", "x");
        r.check(Check::below("residual", f64::INFINITY, 1.0));
        let j = r.to_json();
        assert!(j.ends_with("}\n"));
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["tool"], "minigraph");
        assert_eq!(v["checks"][0]["value"], serde_json::Value::Null);
        assert!(j.find("\"f1\"").unwrap() < j.find("\"f2\"").unwrap());
        let keys: Vec<_> = ["tool", "version", "schema_version", "seed", "command", "argv", "inputs"]
            .iter()
            .map(|k| j.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(j, r.clone().to_json());
    }
}
