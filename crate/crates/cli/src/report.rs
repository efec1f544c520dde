//! The versioned report every subcommand produces, and its renderings.

use std::fmt::Write as _;

use mahler_core::oracle::OracleResult;
use mahler_core::BigReal;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Debug, Clone)]
pub struct OracleJson {
    pub method: String,
    pub value: f64,
    pub error: f64,
}

impl From<&OracleResult> for OracleJson {
    fn from(r: &OracleResult) -> Self {
        OracleJson {
            method: r.method.name().into(),
            value: r.value,
            error: r.error_estimate,
        }
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: &'static str,
    pub n: Option<usize>,
    pub coeffs: Option<String>,
    pub variant: Option<String>,
    #[serde(rename = "N")]
    pub terms: Option<usize>,
    pub ell: Option<u32>,
    pub precision_bits: u32,
    pub value: Option<f64>,
    pub value_decimal: Option<String>,
    pub certified_error: Option<f64>,
    pub certificate_reason: Option<String>,
    pub oracle: Option<OracleJson>,
    pub runtime_ms: u64,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
    pub details: Value,
}

impl Report {
    pub fn new(subcommand: &'static str, precision_bits: u32) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            subcommand,
            n: None,
            coeffs: None,
            variant: None,
            terms: None,
            ell: None,
            precision_bits,
            value: None,
            value_decimal: None,
            certified_error: None,
            certificate_reason: None,
            oracle: None,
            runtime_ms: 0,
            seed: None,
            warnings: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn set_value(&mut self, v: &BigReal) {
        self.value = Some(v.to_f64());
        self.value_decimal = Some(v.to_decimal_string(decimal_digits(self.precision_bits)));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Two-column text rendering of the non-null fields.
    pub fn to_table(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        if let Value::Object(map) = v {
            for (k, val) in map {
                match (k.as_str(), val) {
                    (_, Value::Null) => {}
                    ("warnings", Value::Array(a)) if a.is_empty() => {}
                    ("details", Value::Object(d)) => {
                        for (dk, dv) in d {
                            rows.push((dk, scalar_text(&dv)));
                        }
                    }
                    ("oracle", Value::Object(o)) => {
                        for (ok, ov) in o {
                            rows.push((format!("oracle.{ok}"), scalar_text(&ov)));
                        }
                    }
                    (k, val) => rows.push((k.to_string(), scalar_text(&val))),
                }
            }
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Digits for the decimal rendering: the precision in decimal, at most 50.
pub fn decimal_digits(bits: u32) -> usize {
    ((bits as f64 * std::f64::consts::LOG10_2) as usize).clamp(1, 50)
}

#[derive(Serialize, Debug)]
pub struct ErrorReport<'a> {
    pub schema_version: u32,
    pub subcommand: &'a str,
    pub error: ErrorBody<'a>,
}

#[derive(Serialize, Debug)]
pub struct ErrorBody<'a> {
    pub kind: &'a str,
    pub message: String,
    pub exit_code: i32,
}
