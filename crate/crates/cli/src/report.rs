//! Serialized shapes of every command's output.

use serde::Serialize;

use qhs_core::scalar::format_rational;
use qhs_core::{BigFloat, RealScalar, Rational};

/// Exact rationals travel as `"p/q"` strings.
pub fn exact(r: &Rational) -> String {
    format_rational(r)
}

/// A rounded decimal together with the number of significant digits kept.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Decimal {
    pub value: String,
    pub digits: u64,
}

impl Decimal {
    pub fn from_rational(r: &Rational, digits: u64) -> Decimal {
        Decimal::from_big(&BigFloat::from_rational(r, digits), digits)
    }

    pub fn from_big(v: &BigFloat, digits: u64) -> Decimal {
        Decimal { value: v.with_digits(digits).value().normalized().to_string(), digits }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum Coefficient {
    Exact(String),
    Decimal(Decimal),
}

impl Coefficient {
    pub fn csv_text(&self) -> String {
        match self {
            Coefficient::Exact(s) => s.clone(),
            Coefficient::Decimal(d) => d.value.clone(),
        }
    }
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct ContextEcho {
    pub q: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_hat: Option<String>,
    /// Digits kept when `lambda_hat` was derived from `lambda`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_hat_digits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u64>,
}

#[derive(Serialize, Debug)]
pub struct ClassicalRow {
    pub n: usize,
    /// Ascending powers of x.
    pub coefficients: Vec<String>,
    pub gamma: Option<String>,
    pub normalized_norm: String,
}

#[derive(Serialize, Debug)]
pub struct ClassicalReport {
    pub command: &'static str,
    pub context: ContextEcho,
    pub rows: Vec<ClassicalRow>,
}

#[derive(Serialize, Debug)]
pub struct SobolevRow {
    pub n: usize,
    pub coefficients: Vec<Coefficient>,
}

#[derive(Serialize, Debug)]
pub struct SobolevReport {
    pub command: &'static str,
    pub context: ContextEcho,
    /// `"exact"` or `"decimal"`.
    pub mode: &'static str,
    pub rows: Vec<SobolevRow>,
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct CheckEntry {
    pub identity: &'static str,
    pub n: usize,
    pub status: Status,
    /// Canonical form of the nonzero residual.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Present on failures so each witness is self-contained.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextEcho>,
}

#[derive(Serialize, Debug)]
pub struct IdentitySummary {
    pub identity: &'static str,
    pub n_min: usize,
    pub n_max: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Serialize, Debug, Default)]
pub struct Totals {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Serialize, Debug)]
pub struct VerifyReport {
    pub command: &'static str,
    pub context: ContextEcho,
    pub n_max: usize,
    pub summary: Totals,
    pub identities: Vec<IdentitySummary>,
    pub checks: Vec<CheckEntry>,
    pub timing_ms: u128,
}

#[derive(Serialize, Debug)]
pub struct PlotColumn {
    pub n: usize,
    pub values: Vec<Decimal>,
}

#[derive(Serialize, Debug)]
pub struct PlotReport {
    pub command: &'static str,
    pub context: ContextEcho,
    pub x: Vec<Decimal>,
    pub columns: Vec<PlotColumn>,
}

#[derive(Serialize, Debug)]
pub struct GramReport {
    pub command: &'static str,
    pub context: ContextEcho,
    pub n_max: usize,
    pub matrix: Vec<Vec<Decimal>>,
    pub max_relative_off_diagonal: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}
