//! Differencing, lags, seasonal dummies and the VECM regressor layout.

use std::collections::HashSet;
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataio::{Panel, QuarterIndex};
use crate::error::{Error, Result};

/// `order`-th difference; output is `order` elements shorter than the input.
pub fn difference(series: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::InvalidInput("difference order must be positive".into()));
    }
    if order >= series.len() {
        return Err(Error::InsufficientSample(format!(
            "cannot take difference of order {order} of a series of length {}",
            series.len()
        )));
    }
    let mut out = series.to_vec();
    for _ in 0..order {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Running sum of `increments` starting from `start`; the inverse of a first difference.
pub fn cumulative_sum(start: f64, increments: &[f64]) -> Vec<f64> {
    let mut acc = start;
    let mut out = Vec::with_capacity(increments.len() + 1);
    out.push(acc);
    for d in increments {
        acc += d;
        out.push(acc);
    }
    out
}

/// Series shifted back by `j`: entry `t` holds `series[t - j]`, the first `j` are `None`.
pub fn lag(series: &[f64], j: usize) -> Result<Vec<Option<f64>>> {
    if j >= series.len() && j > 0 {
        return Err(Error::InsufficientSample(format!(
            "lag {j} not available for a series of length {}",
            series.len()
        )));
    }
    Ok((0..series.len()).map(|t| t.checked_sub(j).map(|s| series[s])).collect())
}

/// Seasonal deterministic terms for quarterly VECMs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seasonality {
    None,
    /// 0/1 indicators for Q1-Q3, Q4 absorbed by the constant.
    #[default]
    Indicator,
    /// Indicators minus their quarterly mean of 1/4.
    Centered,
}

impl Seasonality {
    pub fn is_on(self) -> bool {
        self != Seasonality::None
    }
}

impl std::str::FromStr for Seasonality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "off" => Ok(Seasonality::None),
            "indicator" | "on" => Ok(Seasonality::Indicator),
            "centered" => Ok(Seasonality::Centered),
            _ => Err(Error::InvalidInput(format!("unknown seasonality {s:?}"))),
        }
    }
}

pub const DUMMY_NAMES: [&str; 3] = ["sd1", "sd2", "sd3"];

/// Seasonal dummy columns `sd1..sd3` aligned to a quarterly index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DummySet {
    pub centered: bool,
    pub columns: [Vec<f64>; 3],
}

impl DummySet {
    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dummy values for row `t`.
    pub fn row(&self, t: usize) -> [f64; 3] {
        [self.columns[0][t], self.columns[1][t], self.columns[2][t]]
    }
}

/// 0/1 quarter indicators with Q4 as the omitted base.
pub fn seasonal_dummies(index: &[QuarterIndex]) -> Result<DummySet> {
    Ok(dummies_for(index, Seasonality::Indicator)?.expect("indicator coding always yields dummies"))
}

/// Dummies for the given coding; `None` when seasonality is switched off.
pub fn dummies_for(index: &[QuarterIndex], seasonality: Seasonality) -> Result<Option<DummySet>> {
    if index.is_empty() {
        return Err(Error::InvalidInput("seasonal dummies need a nonempty index".into()));
    }
    let shift = match seasonality {
        Seasonality::None => return Ok(None),
        Seasonality::Indicator => 0.0,
        Seasonality::Centered => 0.25,
    };
    let col = |quarter: u8| {
        index
            .iter()
            .map(|q| if q.quarter() == quarter { 1.0 } else { 0.0 } - shift)
            .collect()
    };
    Ok(Some(DummySet {
        centered: shift != 0.0,
        columns: [col(1), col(2), col(3)],
    }))
}

/// Named regressor columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    data: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn new(names: Vec<String>, data: DMatrix<f64>) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} column names for {} columns",
                names.len(),
                data.ncols()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate regressor name {dup:?}")));
        }
        Ok(DesignMatrix { names, data })
    }

    pub fn from_columns(names: Vec<String>, columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().position(|c| c.len() != n) {
            return Err(Error::InvalidInput(format!("regressor column {bad} has a different length")));
        }
        DesignMatrix::new(names, DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.data.column(j).iter().copied().collect())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for row in self.data.row_iter() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Responses and regressors for the error-correction equations.
#[derive(Debug, Clone)]
pub struct VecmDesign {
    /// Quarter of each usable row.
    pub index: Vec<QuarterIndex>,
    /// `d.<variable>` labels of the response columns.
    pub response_names: Vec<String>,
    /// `T_eff × p` first differences `Δy_t`.
    pub responses: DMatrix<f64>,
    /// `T_eff × p` lagged levels `y_{t-1}`.
    pub lagged_levels: DMatrix<f64>,
    pub design: DesignMatrix,
}

impl VecmDesign {
    pub fn t_eff(&self) -> usize {
        self.index.len()
    }

    pub fn response(&self, j: usize) -> Vec<f64> {
        self.responses.column(j).iter().copied().collect()
    }
}

/// Builds the regressor layout of the error-correction equations.
///
/// Columns, in order: `d.<var>.l<i>` for `i = 1..k` (lag-major, variables in
/// panel order), `const`, `sd1..sd3` when `dummies` is given, and `ec1..ecr`.
/// Each `ec_terms[j]` is a full-length equilibrium-deviation series `z_t`; the
/// row for time `t` uses `z_{t-1}`. `T_eff = T - k - 1`.
pub fn build_vecm_design(
    panel: &Panel,
    k: usize,
    ec_terms: &[Vec<f64>],
    dummies: Option<&DummySet>,
) -> Result<VecmDesign> {
    let (t_total, p) = (panel.len(), panel.nvars());
    if k == 0 {
        return Err(Error::InvalidInput("the VECM needs at least one differenced lag".into()));
    }
    if t_total <= k + 1 {
        return Err(Error::InsufficientSample(format!(
            "{t_total} observations leave no usable rows with {k} differenced lags"
        )));
    }
    if let Some(bad) = ec_terms.iter().position(|e| e.len() != t_total) {
        return Err(Error::InvalidInput(format!("error-correction series {bad} is not aligned with the panel")));
    }
    if let Some(d) = dummies {
        if d.len() != t_total {
            return Err(Error::InvalidInput("dummy set is not aligned with the panel".into()));
        }
    }

    let start = k + 1;
    let t_eff = t_total - start;
    let ncols = p * k + 1 + dummies.map_or(0, |_| 3) + ec_terms.len();
    if t_eff < ncols + 1 {
        return Err(Error::InsufficientSample(format!(
            "{t_eff} usable rows for {ncols} regressors"
        )));
    }

    let levels = panel.columns();
    let dy = |j: usize, t: usize| levels[j][t] - levels[j][t - 1];

    let mut names = Vec::with_capacity(ncols);
    for i in 1..=k {
        for name in panel.names() {
            names.push(format!("d.{name}.l{i}"));
        }
    }
    names.push("const".to_string());
    if dummies.is_some() {
        names.extend(DUMMY_NAMES.iter().map(|s| s.to_string()));
    }
    names.extend((1..=ec_terms.len()).map(|j| format!("ec{j}")));

    let mut x = DMatrix::zeros(t_eff, ncols);
    let mut responses = DMatrix::zeros(t_eff, p);
    let mut lagged_levels = DMatrix::zeros(t_eff, p);
    for row in 0..t_eff {
        let t = start + row;
        let mut c = 0;
        for i in 1..=k {
            for j in 0..p {
                x[(row, c)] = dy(j, t - i);
                c += 1;
            }
        }
        x[(row, c)] = 1.0;
        c += 1;
        if let Some(d) = dummies {
            for v in d.row(t) {
                x[(row, c)] = v;
                c += 1;
            }
        }
        for e in ec_terms {
            x[(row, c)] = e[t - 1];
            c += 1;
        }
        for j in 0..p {
            responses[(row, j)] = dy(j, t);
            lagged_levels[(row, j)] = levels[j][t - 1];
        }
    }

    Ok(VecmDesign {
        index: panel.index()[start..].to_vec(),
        response_names: panel.names().iter().map(|n| format!("d.{n}")).collect(),
        responses,
        lagged_levels,
        design: DesignMatrix::new(names, x)?,
    })
}
