//! Embedded critical-value tables.
//!
//! The CSV resources under `resources/` are compiled into the binary and parsed
//! on first use. Their headers carry the source and table version.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DF_RESPONSE_SURFACE_CSV: &str = include_str!("../resources/df_response_surface.csv");
pub const JOHANSEN_STANDARD_CSV: &str = include_str!("../resources/johansen_trace_standard.csv");
pub const JOHANSEN_PAPER_CSV: &str = include_str!("../resources/johansen_trace_paper.csv");

/// Deterministic terms of a unit-root regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deterministic {
    None,
    Constant,
    /// Constant plus linear trend.
    Trend,
}

impl Deterministic {
    fn key(self) -> &'static str {
        match self {
            Deterministic::None => "none",
            Deterministic::Constant => "constant",
            Deterministic::Trend => "trend",
        }
    }
}

impl std::str::FromStr for Deterministic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "n" => Ok(Deterministic::None),
            "constant" | "c" => Ok(Deterministic::Constant),
            "trend" | "constant+trend" | "ct" => Ok(Deterministic::Trend),
            _ => Err(Error::InvalidInput(format!("unknown deterministic specification {s:?}"))),
        }
    }
}

/// Left-tail critical values at the three conventional levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one: f64,
    #[serde(rename = "5%")]
    pub five: f64,
    #[serde(rename = "10%")]
    pub ten: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "1%")]
    One,
    #[serde(rename = "5%")]
    #[default]
    Five,
    #[serde(rename = "10%")]
    Ten,
}

impl Level {
    pub fn pick(self, cv: &CriticalValues) -> f64 {
        match self {
            Level::One => cv.one,
            Level::Five => cv.five,
            Level::Ten => cv.ten,
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1%" | "0.01" => Ok(Level::One),
            "5%" | "0.05" => Ok(Level::Five),
            "10%" | "0.10" | "0.1" => Ok(Level::Ten),
            _ => Err(Error::InvalidInput(format!("unknown significance level {s:?}"))),
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Level::One => "1%",
            Level::Five => "5%",
            Level::Ten => "10%",
        })
    }
}

#[derive(Debug, Deserialize)]
struct SurfaceRow {
    case: String,
    n: usize,
    level: String,
    b0: f64,
    b1: f64,
    b2: f64,
    b3: f64,
}

fn parse_csv<T: serde::de::DeserializeOwned>(text: &str) -> Vec<T> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .expect("embedded critical-value table is well formed")
}

static SURFACES: LazyLock<Vec<SurfaceRow>> = LazyLock::new(|| parse_csv(DF_RESPONSE_SURFACE_CSV));

/// Response-surface critical values `b0 + b1/T + b2/T² + b3/T³`.
///
/// `n_vars = 1` gives Dickey-Fuller values; `n_vars ≥ 2` gives Engle-Granger
/// values for a cointegrating regression on `n_vars` I(1) variables.
pub fn df_critical_values(case: Deterministic, n_vars: usize, nobs: usize) -> Result<CriticalValues> {
    if nobs == 0 {
        return Err(Error::InvalidInput("critical values need a positive sample size".into()));
    }
    let t = nobs as f64;
    let value = |level: &str| {
        SURFACES
            .iter()
            .find(|r| r.case == case.key() && r.n == n_vars && r.level == level)
            .map(|r| r.b0 + r.b1 / t + r.b2 / (t * t) + r.b3 / (t * t * t))
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "no critical values for deterministic case {:?} with {n_vars} variables",
                    case.key()
                ))
            })
    };
    Ok(CriticalValues {
        one: value("0.01")?,
        five: value("0.05")?,
        ten: value("0.10")?,
    })
}

/// Which table of Johansen trace critical values to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalTable {
    /// Asymptotic quantiles for the unrestricted-constant case.
    #[default]
    Standard,
    /// Fixed 5% values (9.2, 15.7, 22.0, 28.1) for four-variable systems.
    Paper,
}

impl std::str::FromStr for CriticalTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(CriticalTable::Standard),
            "paper" => Ok(CriticalTable::Paper),
            _ => Err(Error::InvalidInput(format!("unknown critical-value table {s:?}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    p_minus_r: usize,
    #[allow(dead_code)]
    cv90: Option<f64>,
    cv95: f64,
    #[allow(dead_code)]
    cv99: Option<f64>,
}

static TRACE_STANDARD: LazyLock<Vec<TraceRow>> = LazyLock::new(|| parse_csv(JOHANSEN_STANDARD_CSV));
static TRACE_PAPER: LazyLock<Vec<TraceRow>> = LazyLock::new(|| parse_csv(JOHANSEN_PAPER_CSV));

/// 5% trace critical values for `H0: rank ≤ r`, `r = 0..p-1`.
pub fn trace_critical_values(table: CriticalTable, p: usize) -> Result<Vec<f64>> {
    let rows: &[TraceRow] = match table {
        CriticalTable::Standard => &TRACE_STANDARD,
        CriticalTable::Paper => {
            if p != 4 {
                return Err(Error::InvalidInput(format!(
                    "the `paper` critical-value table covers 4-variable systems only, got {p}"
                )));
            }
            &TRACE_PAPER
        }
    };
    (0..p)
        .map(|r| {
            rows.iter()
                .find(|row| row.p_minus_r == p - r)
                .map(|row| row.cv95)
                .ok_or_else(|| Error::InvalidInput(format!("no trace critical value for p - r = {}", p - r)))
        })
        .collect()
}
