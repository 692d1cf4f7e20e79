//! Declarative run configuration: a TOML file overlaid with command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ecmkit::{AdfConfig, CriticalTable, Deterministic, Level, QuarterIndex, Seasonality, SeriesSpec};
use serde::{Deserialize, Serialize};

/// A count chosen either by the user or by a selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Auto {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for Auto {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Auto::Auto);
        }
        s.parse()
            .map(Auto::Fixed)
            .map_err(|_| format!("expected a non-negative integer or \"auto\", got {s:?}"))
    }
}

impl std::fmt::Display for Auto {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Auto::Auto => f.write_str("auto"),
            Auto::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Auto {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Auto::Auto => s.serialize_str("auto"),
            Auto::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Auto {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Auto::Fixed(n)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Formats {
    pub text: bool,
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Formats {
    pub fn all() -> Self {
        Formats {
            text: true,
            csv: true,
            json: true,
            svg: true,
        }
    }

    fn parse(items: &[String], errors: &mut Vec<String>) -> Self {
        let mut f = Formats::default();
        for item in items {
            match item.trim() {
                "text" => f.text = true,
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => errors.push(format!("format: unknown output format {other:?} (text, csv, json, svg)")),
            }
        }
        f
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdfSection {
    pub deterministic: Option<String>,
    pub lags: Option<usize>,
    pub lag_rule: Option<String>,
    pub level: Option<String>,
}

/// The configuration file as written.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data_dir: Option<PathBuf>,
    #[serde(default)]
    pub series: Vec<SeriesSpec>,
    pub variables: Option<Vec<String>>,
    pub start: Option<String>,
    pub end: Option<String>,
    pub holdout: Option<usize>,
    pub lags: Option<Auto>,
    pub max_lags: Option<usize>,
    pub rank: Option<Auto>,
    pub seasonality: Option<String>,
    pub cv_table: Option<String>,
    pub adf: Option<AdfSection>,
    pub eg_dependent: Option<String>,
    pub ordering: Option<Vec<String>>,
    pub horizon: Option<usize>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub seed: Option<u64>,
}

/// Values given on the command line; each one replaces its file counterpart.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lags: Option<Auto>,
    pub rank: Option<Auto>,
    pub holdout: Option<usize>,
    pub ordering: Option<Vec<String>>,
    pub cv_table: Option<String>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub seed: Option<u64>,
}

/// Validated settings for one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub series: Vec<SeriesSpec>,
    pub variables: Vec<String>,
    pub start: Option<QuarterIndex>,
    pub end: Option<QuarterIndex>,
    pub holdout: usize,
    pub lags: Auto,
    pub max_lags: usize,
    pub rank: Auto,
    pub seasonality: Seasonality,
    pub cv_table: CriticalTable,
    pub adf: AdfConfig,
    pub eg_dependent: String,
    pub ordering: Vec<String>,
    pub horizon: usize,
    pub out: PathBuf,
    pub formats: Formats,
    pub seed: u64,
}

fn parse_field<T: FromStr>(field: &str, value: Option<&str>, default: T, errors: &mut Vec<String>) -> T
where
    T::Err: std::fmt::Display,
{
    match value {
        None => default,
        Some(v) => v.parse().unwrap_or_else(|e| {
            errors.push(format!("{field}: {e}"));
            default
        }),
    }
}

impl RunConfig {
    /// Reads and parses a TOML file. Paths inside it are relative to its directory.
    pub fn read_file(path: &Path) -> Result<(FileConfig, PathBuf), Vec<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| vec![format!("config {}: {e}", path.display())])?;
        let file: FileConfig =
            toml::from_str(&text).map_err(|e| vec![format!("config {}: {}", path.display(), e.message())])?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((file, base))
    }

    /// Merges flags over the file and checks everything that can be checked
    /// without reading data, reporting every problem at once.
    pub fn resolve(file: FileConfig, base: &Path, flags: Overrides) -> Result<RunConfig, Vec<String>> {
        let mut errors = Vec::new();

        if file.series.is_empty() {
            errors.push("series: at least one [[series]] entry is required".into());
        }
        let mut seen = std::collections::HashSet::new();
        for s in &file.series {
            if !seen.insert(s.name.as_str()) {
                errors.push(format!("series: duplicate name {:?}", s.name));
            }
        }
        let all_names: Vec<String> = file.series.iter().map(|s| s.name.clone()).collect();
        let variables = file.variables.clone().unwrap_or_else(|| all_names.clone());
        for v in &variables {
            if !all_names.contains(v) {
                errors.push(format!("variables: {v:?} has no [[series]] entry"));
            }
        }
        if variables.is_empty() {
            errors.push("variables: the list is empty".into());
        }

        let quarter = |field: &str, v: &Option<String>, errors: &mut Vec<String>| {
            v.as_deref().and_then(|s| {
                ecmkit::parse_quarter(s)
                    .map_err(|e| errors.push(format!("{field}: {e}")))
                    .ok()
            })
        };
        let start = quarter("start", &file.start, &mut errors);
        let end = quarter("end", &file.end, &mut errors);
        if let (Some(s), Some(e)) = (start, end) {
            if s > e {
                errors.push(format!("start {s} is after end {e}"));
            }
        }

        let holdout = flags.holdout.or(file.holdout).unwrap_or(0);
        if let (Some(s), Some(e)) = (start, end) {
            let len = s.quarters_until(e) + 1;
            if holdout as i64 >= len - 20 {
                errors.push(format!("holdout: {holdout} quarters leaves fewer than 20 of the {len} in the sample"));
            }
        }

        let lags = flags.lags.or(file.lags).unwrap_or_default();
        let max_lags = file.max_lags.unwrap_or(6);
        if lags == Auto::Fixed(0) {
            errors.push("lags: at least one differenced lag is required".into());
        }
        if max_lags == 0 {
            errors.push("max_lags: must be at least 1".into());
        }
        let rank = flags.rank.or(file.rank).unwrap_or_default();
        if let Auto::Fixed(r) = rank {
            if r > variables.len() {
                errors.push(format!("rank: {r} exceeds the {} variables", variables.len()));
            }
        }

        let seasonality = parse_field("seasonality", file.seasonality.as_deref(), Seasonality::Indicator, &mut errors);
        let cv_table = parse_field(
            "cv_table",
            flags.cv_table.as_deref().or(file.cv_table.as_deref()),
            CriticalTable::Standard,
            &mut errors,
        );
        if cv_table == CriticalTable::Paper && variables.len() != 4 {
            errors.push(format!(
                "cv_table: the `paper` table covers four-variable systems, {} variables configured",
                variables.len()
            ));
        }
        let adf_file = file.adf.clone().unwrap_or_default();
        let defaults = AdfConfig::default();
        let adf = AdfConfig {
            deterministic: parse_field(
                "adf.deterministic",
                adf_file.deterministic.as_deref(),
                Deterministic::Constant,
                &mut errors,
            ),
            max_lags: adf_file.lags.unwrap_or(defaults.max_lags),
            lag_rule: parse_field("adf.lag_rule", adf_file.lag_rule.as_deref(), defaults.lag_rule, &mut errors),
            level: parse_field("adf.level", adf_file.level.as_deref(), Level::Five, &mut errors),
        };

        let eg_dependent = file
            .eg_dependent
            .clone()
            .or_else(|| variables.first().cloned())
            .unwrap_or_default();
        if !variables.is_empty() && !variables.contains(&eg_dependent) {
            errors.push(format!("eg_dependent: {eg_dependent:?} is not among the variables"));
        }

        let ordering = flags
            .ordering
            .or(file.ordering.clone())
            .unwrap_or_else(|| variables.clone());
        let mut sorted_o = ordering.clone();
        let mut sorted_v = variables.clone();
        sorted_o.sort();
        sorted_v.sort();
        if sorted_o != sorted_v {
            errors.push(format!("ordering: {ordering:?} is not a permutation of {variables:?}"));
        }

        let horizon = file.horizon.unwrap_or(8);
        if horizon == 0 {
            errors.push("horizon: must be at least 1".into());
        }

        let formats = match flags.formats.or(file.formats.clone()) {
            Some(items) => Formats::parse(&items, &mut errors),
            None => Formats::all(),
        };

        let out = match flags.out {
            Some(o) => o,
            None => base.join(file.out.clone().unwrap_or_else(|| PathBuf::from("out"))),
        };

        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(RunConfig {
            data_dir: base.join(file.data_dir.unwrap_or_default()),
            series: file
                .series
                .into_iter()
                .filter(|s| variables.contains(&s.name))
                .collect(),
            variables,
            start,
            end,
            holdout,
            lags,
            max_lags,
            rank,
            seasonality,
            cv_table,
            adf,
            eg_dependent,
            ordering,
            horizon,
            out,
            formats,
            seed: flags.seed.or(file.seed).unwrap_or(0),
        })
    }
}
