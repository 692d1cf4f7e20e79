//! Quarterly calendar, CSV ingestion into aligned panels, and summary statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{fmt_num, TextTable};

/// A calendar quarter. Ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct QuarterIndex {
    year: i32,
    quarter: u8,
}

impl QuarterIndex {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidInput(format!("quarter must be in 1..=4, got {quarter}")));
        }
        Ok(QuarterIndex { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    /// Quarter `n` steps later (earlier for negative `n`).
    pub fn offset(self, n: i64) -> Self {
        let ordinal = self.ordinal() + n;
        QuarterIndex {
            year: ordinal.div_euclid(4) as i32,
            quarter: (ordinal.rem_euclid(4) + 1) as u8,
        }
    }

    /// Number of quarters from `self` to `other` (positive if `other` is later).
    pub fn quarters_until(self, other: QuarterIndex) -> i64 {
        other.ordinal() - self.ordinal()
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    /// ISO date of the first day of the quarter, the FRED convention.
    pub fn start_date(self) -> String {
        format!("{:04}-{:02}-01", self.year, (self.quarter - 1) * 3 + 1)
    }
}

impl fmt::Display for QuarterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_quarter(s)
    }
}

impl TryFrom<String> for QuarterIndex {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        parse_quarter(&s)
    }
}

impl From<QuarterIndex> for String {
    fn from(q: QuarterIndex) -> String {
        q.to_string()
    }
}

/// Parses `YYYY-MM-DD` (month mapped to its quarter) or `YYYYQn`.
pub fn parse_quarter(text: &str) -> Result<QuarterIndex> {
    let token = text.trim();
    let bad = || Error::ParseQuarter {
        token: token.to_string(),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());

    if let Some(pos) = token.find(['Q', 'q']) {
        let (year, q) = (&token[..pos], &token[pos + 1..]);
        if year.len() != 4 || !digits(year) || q.len() != 1 || !digits(q) {
            return Err(bad());
        }
        let quarter: u8 = q.parse().map_err(|_| bad())?;
        return QuarterIndex::new(year.parse().map_err(|_| bad())?, quarter).map_err(|_| bad());
    }

    let parts: Vec<&str> = token.split('-').collect();
    if parts.len() != 3 || parts[0].len() != 4 || parts[1].len() != 2 || parts[2].len() != 2 {
        return Err(bad());
    }
    if !parts.iter().all(|p| digits(p)) {
        return Err(bad());
    }
    let year: i32 = parts[0].parse().map_err(|_| bad())?;
    let month: u8 = parts[1].parse().map_err(|_| bad())?;
    let day: u8 = parts[2].parse().map_err(|_| bad())?;
    if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
        return Err(bad());
    }
    QuarterIndex::new(year, (month - 1) / 3 + 1)
}

/// Descriptive unit note carried alongside a series. Has no numeric effect.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformNote {
    #[default]
    None,
    ChainedDollars,
}

fn default_date_column() -> String {
    "DATE".to_string()
}

/// One panel variable and where to read it from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub name: String,
    /// CSV path, relative to the directory handed to [`load_panel`].
    pub file: PathBuf,
    #[serde(alias = "column")]
    pub source_column: String,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default)]
    pub transform: TransformNote,
}

impl SeriesSpec {
    pub fn new(name: impl Into<String>, file: impl Into<PathBuf>, source_column: impl Into<String>) -> Self {
        SeriesSpec {
            name: name.into(),
            file: file.into(),
            source_column: source_column.into(),
            date_column: default_date_column(),
            transform: TransformNote::None,
        }
    }
}

/// Aligned multivariate quarterly series on a gap-free calendar index.
///
/// Variable order is significant: it is the default Cholesky ordering for
/// impulse responses and variance decompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    index: Vec<QuarterIndex>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Panel {
    pub fn new(index: Vec<QuarterIndex>, names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::InvalidInput("panel index is empty".into()));
        }
        if names.len() != columns.len() {
            return Err(Error::InvalidInput(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate variable name {name:?}")));
            }
        }
        for w in index.windows(2) {
            if w[1] != w[0].succ() {
                return Err(Error::InvalidInput(format!("gap in index after {}", w[0])));
            }
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != index.len() {
                return Err(Error::InvalidInput(format!(
                    "column {name:?} has length {}, index has {}",
                    col.len(),
                    index.len()
                )));
            }
            if let Some(t) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite value in {name:?} at {}", index[t])));
            }
        }
        Ok(Panel { index, names, columns })
    }

    /// Builds a panel on consecutive quarters starting at `start`.
    pub fn from_start(start: QuarterIndex, names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let len = columns.first().map_or(0, Vec::len);
        let index = (0..len as i64).map(|i| start.offset(i)).collect();
        Panel::new(index, names, columns)
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self) -> &[QuarterIndex] {
        &self.index
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.position(name).map(|j| self.column(j))
    }

    pub fn first(&self) -> QuarterIndex {
        self.index[0]
    }

    pub fn last(&self) -> QuarterIndex {
        self.index[self.index.len() - 1]
    }

    /// Observation row `t` as a vector over variables.
    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }

    /// Levels as a `T × p` matrix.
    pub fn levels_matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.len(), self.nvars(), |t, j| self.columns[j][t])
    }

    /// Contiguous sub-panel of rows `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Panel> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::InvalidInput(format!(
                "row range {range:?} outside panel of length {}",
                self.len()
            )));
        }
        Panel::new(
            self.index[range.clone()].to_vec(),
            self.names.clone(),
            self.columns.iter().map(|c| c[range.clone()].to_vec()).collect(),
        )
    }

    /// Rows from `from` through `to`, inclusive.
    pub fn span(&self, from: QuarterIndex, to: QuarterIndex) -> Result<Panel> {
        let start = self.index.iter().position(|&q| q == from);
        let end = self.index.iter().position(|&q| q == to);
        match (start, end) {
            (Some(s), Some(e)) if s <= e => self.slice(s..e + 1),
            _ => Err(Error::InvalidInput(format!(
                "span {from}..{to} not inside panel {}..{}",
                self.first(),
                self.last()
            ))),
        }
    }

    /// Reorders (and optionally subsets) variables.
    pub fn select(&self, names: &[String]) -> Result<Panel> {
        let columns = names
            .iter()
            .map(|n| {
                self.column_by_name(n)
                    .map(<[f64]>::to_vec)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown variable {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Panel::new(self.index.clone(), names.to_vec(), columns)
    }

    /// Copy with variable `j` multiplied by `factor`.
    pub fn with_scaled_column(&self, j: usize, factor: f64) -> Panel {
        let mut out = self.clone();
        out.columns[j].iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Wide CSV: a `DATE` column of quarter start dates, then one column per variable.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["DATE".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for t in 0..self.len() {
            let mut rec = vec![self.index[t].start_date()];
            rec.extend(self.columns.iter().map(|c| c[t].to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the wide layout produced by [`Panel::write_csv`].
    pub fn read_csv<R: Read>(reader: R, source: &Path) -> Result<Panel> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0) != Some("DATE") {
            return Err(Error::load(source, Some(1), "first column must be DATE"));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut index = Vec::new();
        let mut columns = vec![Vec::new(); names.len()];
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            index.push(parse_quarter(&rec[0]).map_err(|e| Error::load(source, Some(line), e.to_string()))?);
            for (j, col) in columns.iter_mut().enumerate() {
                let field = rec.get(j + 1).unwrap_or("");
                col.push(parse_value(field).map_err(|m| Error::load(source, Some(line), m))?);
            }
        }
        Panel::new(index, names, columns).map_err(|e| Error::load(source, None, e.to_string()))
    }

    /// JSON records, one object per quarter: `{"date": "1950Q1", "<var>": value, ...}`.
    pub fn to_json_records(&self) -> serde_json::Value {
        let rows = (0..self.len())
            .map(|t| {
                let mut obj = serde_json::Map::new();
                obj.insert("date".into(), self.index[t].to_string().into());
                for (name, col) in self.names.iter().zip(&self.columns) {
                    obj.insert(name.clone(), col[t].into());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

fn parse_value(field: &str) -> std::result::Result<f64, String> {
    if field.is_empty() || field == "." {
        return Err("missing value".into());
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("unparseable value {field:?}")),
    }
}

struct RawSeries {
    path: PathBuf,
    /// quarter -> (value, 1-based line number)
    values: BTreeMap<QuarterIndex, (f64, usize)>,
}

fn read_series(path: &Path, spec: &SeriesSpec) -> Result<RawSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::load(path, None, e.to_string()))?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = r.headers().map_err(|e| Error::load(path, Some(1), e.to_string()))?.clone();
    let find = |col: &str| {
        header
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| Error::load(path, Some(1), format!("missing column {col:?}")))
    };
    let date_col = find(&spec.date_column)?;
    let value_col = find(&spec.source_column)?;

    let mut values = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::load(path, Some(line), e.to_string()))?;
        let date = rec.get(date_col).unwrap_or("");
        let q = parse_quarter(date).map_err(|e| Error::load(path, Some(line), e.to_string()))?;
        let v = parse_value(rec.get(value_col).unwrap_or("")).map_err(|m| Error::load(path, Some(line), m))?;
        if let Some((_, first)) = values.insert(q, (v, line)) {
            return Err(Error::load(
                path,
                Some(line),
                format!("duplicate quarter {q} (first seen at row {first})"),
            ));
        }
    }
    Ok(RawSeries {
        path: path.to_path_buf(),
        values,
    })
}

/// Loads every series and inner-joins them on the quarterly index.
///
/// File paths in `specs` are resolved against `base`. The joined index must be
/// contiguous; any quarter missing inside the common range is an error.
pub fn load_panel(base: &Path, specs: &[SeriesSpec]) -> Result<Panel> {
    if specs.is_empty() {
        return Err(Error::InvalidInput("no series specified".into()));
    }
    let mut seen = HashSet::new();
    for s in specs {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate series name {:?}", s.name)));
        }
    }

    let raw = specs
        .iter()
        .map(|s| read_series(&base.join(&s.file), s))
        .collect::<Result<Vec<_>>>()?;

    let common: Vec<QuarterIndex> = raw[0]
        .values
        .keys()
        .filter(|q| raw[1..].iter().all(|r| r.values.contains_key(q)))
        .copied()
        .collect();
    if common.is_empty() {
        return Err(Error::load(base, None, "empty intersection of quarterly date ranges"));
    }

    for w in common.windows(2) {
        let expected = w[0].succ();
        if w[1] != expected {
            let culprit = raw.iter().find(|r| !r.values.contains_key(&expected)).unwrap_or(&raw[0]);
            let row = culprit.values.get(&w[0]).map(|&(_, line)| line + 1);
            return Err(Error::load(&culprit.path, row, format!("gap at {expected}")));
        }
    }

    let columns = raw
        .iter()
        .map(|r| common.iter().map(|q| r.values[q].0).collect())
        .collect();
    Panel::new(common, specs.iter().map(|s| s.name.clone()).collect(), columns)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Level,
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variable: String,
    pub form: Form,
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

/// Per-variable descriptive statistics for levels followed by first differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub observations: usize,
    pub rows: Vec<SummaryRow>,
}

fn describe(variable: &str, form: Form, xs: &[f64]) -> SummaryRow {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let std_dev = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
    SummaryRow {
        variable: variable.to_string(),
        form,
        n,
        mean,
        std_dev,
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn summarize(panel: &Panel) -> Result<SummaryTable> {
    if panel.len() < 2 {
        return Err(Error::InsufficientSample(format!(
            "summary needs at least 2 observations, panel has {}",
            panel.len()
        )));
    }
    let mut rows: Vec<SummaryRow> = panel
        .names()
        .iter()
        .zip(panel.columns())
        .map(|(n, c)| describe(n, Form::Level, c))
        .collect();
    for (name, col) in panel.names().iter().zip(panel.columns()) {
        let diff = crate::series::difference(col, 1)?;
        rows.push(describe(name, Form::Difference, &diff));
    }
    Ok(SummaryTable {
        observations: panel.len(),
        rows,
    })
}

impl SummaryRow {
    pub fn label(&self) -> String {
        match self.form {
            Form::Level => self.variable.clone(),
            Form::Difference => format!("d.{}", self.variable),
        }
    }
}

impl SummaryTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["variable", "form", "n", "mean", "std_dev", "min", "max"])?;
        for r in &self.rows {
            let form = match r.form {
                Form::Level => "level",
                Form::Difference => "difference",
            };
            w.write_record([
                r.variable.clone(),
                form.to_string(),
                r.n.to_string(),
                r.mean.to_string(),
                r.std_dev.to_string(),
                r.min.to_string(),
                r.max.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut t = TextTable::new(vec!["", "Mean", "Std. Dev.", "Minimum", "Maximum"]);
        for r in &self.rows {
            t.row(vec![r.label(), fmt_num(r.mean), fmt_num(r.std_dev), fmt_num(r.min), fmt_num(r.max)]);
        }
        format!("{}Observations: {}\n", t.render(), self.observations)
    }
}
