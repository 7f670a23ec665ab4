//! One evaluated inequality, `lower ≤ measured ≤ upper`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Nats,
    Bits,
    /// Dimensional quantities (moments, densities) that have no information unit.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lower: Option<f64>,
    pub measured: f64,
    pub upper: Option<f64>,
    /// measured − lower, absent without a lower side.
    pub slack_lower: Option<f64>,
    /// upper − measured, absent without an upper side.
    pub slack_upper: Option<f64>,
    pub units: Units,
    /// Symbols used by the bound (p, q, r, γ, d, n, ...) plus the tolerance `tol`.
    pub parameters: BTreeMap<String, f64>,
    pub passed: bool,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        lower: Option<f64>,
        measured: f64,
        upper: Option<f64>,
        tol: f64,
        units: Units,
    ) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert("tol".to_string(), tol);
        let mut report = Self {
            name: name.into(),
            lower,
            measured,
            upper,
            slack_lower: None,
            slack_upper: None,
            units,
            parameters,
            passed: false,
        };
        report.refresh();
        report
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn tol(&self) -> f64 {
        self.parameters.get("tol").copied().unwrap_or(0.0)
    }

    fn refresh(&mut self) {
        let tol = self.tol();
        self.slack_lower = self.lower.map(|l| self.measured - l);
        self.slack_upper = self.upper.map(|u| u - self.measured);
        self.passed = self.measured.is_finite()
            && self.slack_lower.map_or(true, |s| s >= -tol)
            && self.slack_upper.map_or(true, |s| s >= -tol);
    }

    /// Converts a nats report to bits (tolerance included); other units are returned unchanged.
    pub fn to_bits(&self) -> Self {
        if self.units != Units::Nats {
            return self.clone();
        }
        let c = |v: f64| v / LN_2;
        let mut out = self.clone();
        out.lower = self.lower.map(c);
        out.upper = self.upper.map(c);
        out.measured = c(self.measured);
        out.units = Units::Bits;
        out.parameters.insert("tol".into(), c(self.tol()));
        out.refresh();
        out
    }
}

/// Table cell with 12 significant digits; absent values are empty.
pub fn format_cell(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x == 0.0 => "0".to_string(),
        Some(x) if !x.is_finite() => format!("{x}"),
        Some(x) => format!("{x:.11e}"),
    }
}
