//! Experiment reports and their CSV/JSON forms.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::discrete::MaxKind;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::fractional::GridSpec;
use crate::rational::{self, Rational};

/// A reported quantity: an exact rational or a floating-point estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Exact(Rational),
    Approx(f64),
}

impl Metric {
    pub fn to_f64(&self) -> f64 {
        match self {
            Metric::Exact(r) => rational::to_f64(r),
            Metric::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Metric::Exact(r) => Some(r),
            Metric::Approx(_) => None,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Exact(r) => f.write_str(&rational::format(r)),
            Metric::Approx(x) => f.write_str(&significant(*x, 12)),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Exact(r) => s.serialize_str(&rational::format(r)),
            Metric::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Metric::Approx(x)),
            Raw::Str(s) => rational::parse(&s).map(Metric::Exact).map_err(de::Error::custom),
        }
    }
}

/// `x` in plain decimal notation with `digits` significant digits; scientific
/// notation outside `[1e−6, 1e15)`.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..15).contains(&exp) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // rounding may carry into a new leading digit
    let s = if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > digits && decimals > 0 {
        format!("{:.*}", decimals - 1, x)
    } else {
        s
    };
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Discrete,
    Fractional,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub j: u32,
    pub input_dist: Metric,
    pub out_dist_primary: Metric,
    pub out_dist_sup: Metric,
    pub extra: Vec<Metric>,
}

/// An invariant checked while the experiment ran.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub beta: Option<f64>,
    pub operator: Option<MaxKind>,
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
    pub sup_samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ReportKind,
    pub family: Family,
    pub metadata: Metadata,
    /// Names of the `extra` columns, in order.
    pub extra_columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown report format {s:?}"))),
        }
    }
}

impl ReportFormat {
    /// From a file extension, defaulting to CSV.
    pub fn for_path(path: &Path) -> ReportFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

impl ExperimentReport {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Metric>> {
        match name {
            "input_dist" => Some(self.rows.iter().map(|r| &r.input_dist).collect()),
            "out_dist_primary" => Some(self.rows.iter().map(|r| &r.out_dist_primary).collect()),
            "out_dist_sup" => Some(self.rows.iter().map(|r| &r.out_dist_sup).collect()),
            _ => {
                let i = self.extra_columns.iter().position(|c| c == name)?;
                Some(self.rows.iter().map(|r| &r.extra[i]).collect())
            }
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["j", "input_dist", "out_dist_primary", "out_dist_sup"];
        header.extend(self.extra_columns.iter().map(String::as_str));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.j.to_string(), r.input_dist.to_string(), r.out_dist_primary.to_string(), r.out_dist_sup.to_string()];
            rec.extend(r.extra.iter().map(Metric::to_string));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn emit_report(r: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => r.to_csv()?,
        ReportFormat::Json => r.to_json()?,
    };
    fs::write(path, text)?;
    Ok(())
}
