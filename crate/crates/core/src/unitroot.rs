//! Augmented Dickey-Fuller tests, integration-order classification and the
//! Engle-Granger two-step cointegration test.

use serde::{Deserialize, Serialize};

use crate::dataio::Panel;
use crate::error::{Error, Result};
use crate::regress::{ols, RegressionResult};
use crate::series::{difference, DesignMatrix};
pub use crate::tables::{CriticalValues, Deterministic, Level};
use crate::tables::df_critical_values;

/// How many lagged differences enter the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagRule {
    /// Exactly `max_lags` lagged differences.
    #[default]
    Fixed,
    /// Minimize BIC over `0..=max_lags` on a common sample.
    Bic,
}

impl std::str::FromStr for LagRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(LagRule::Fixed),
            "bic" => Ok(LagRule::Bic),
            _ => Err(Error::InvalidInput(format!("unknown lag rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfConfig {
    pub deterministic: Deterministic,
    pub max_lags: usize,
    pub lag_rule: LagRule,
    pub level: Level,
}

impl Default for AdfConfig {
    fn default() -> Self {
        AdfConfig {
            deterministic: Deterministic::Constant,
            max_lags: 4,
            lag_rule: LagRule::Fixed,
            level: Level::Five,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    RejectUnitRoot,
    FailToReject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-ratio on the lagged level.
    pub statistic: f64,
    pub lags_used: usize,
    pub nobs: usize,
    pub deterministic: Deterministic,
    pub critical_values: CriticalValues,
    pub level: Level,
    pub decision: Decision,
}

impl AdfResult {
    pub fn rejects(&self) -> bool {
        self.decision == Decision::RejectUnitRoot
    }
}

/// Smallest `d` whose `d`-th difference rejects a unit root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrationOrder {
    Order(usize),
    Inconclusive { max_order: usize },
}

impl std::fmt::Display for IntegrationOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntegrationOrder::Order(d) => write!(f, "I({d})"),
            IntegrationOrder::Inconclusive { max_order } => write!(f, "> I({max_order})"),
        }
    }
}

/// Regression of `Δx_t` on `x_{t-1}`, `lags` lagged differences and the
/// deterministic terms, over rows `t = start..T`.
fn adf_regression(x: &[f64], deterministic: Deterministic, lags: usize, start: usize) -> Result<RegressionResult> {
    debug_assert!(start > lags);
    let rows = start..x.len();
    let dx = |t: usize| x[t] - x[t - 1];

    let mut names = vec!["x.l1".to_string()];
    let mut cols = vec![rows.clone().map(|t| x[t - 1]).collect::<Vec<f64>>()];
    for i in 1..=lags {
        names.push(format!("d.x.l{i}"));
        cols.push(rows.clone().map(|t| dx(t - i)).collect());
    }
    if deterministic != Deterministic::None {
        names.push("const".into());
        cols.push(vec![1.0; rows.len()]);
    }
    if deterministic == Deterministic::Trend {
        names.push("trend".into());
        cols.push(rows.clone().map(|t| t as f64).collect());
    }
    let y: Vec<f64> = rows.map(dx).collect();
    ols(&y, &DesignMatrix::from_columns(names, &cols)?)
}

fn choose_lags(x: &[f64], config: &AdfConfig) -> Result<usize> {
    match config.lag_rule {
        LagRule::Fixed => Ok(config.max_lags),
        LagRule::Bic => {
            let start = config.max_lags + 1;
            let mut best = (f64::INFINITY, 0);
            for lags in 0..=config.max_lags {
                let fit = adf_regression(x, config.deterministic, lags, start)?;
                let n = fit.nobs as f64;
                let k = fit.coefficients.len() as f64;
                let bic = n * (fit.rss / n).ln() + k * n.ln();
                if bic < best.0 {
                    best = (bic, lags);
                }
            }
            Ok(best.1)
        }
    }
}

fn adf_with_table(series: &[f64], config: &AdfConfig, cv_case: Deterministic, cv_vars: usize) -> Result<AdfResult> {
    if series.len() < config.max_lags + 10 {
        return Err(Error::InsufficientSample(format!(
            "ADF with up to {} lags needs at least {} observations, got {}",
            config.max_lags,
            config.max_lags + 10,
            series.len()
        )));
    }
    let lags = choose_lags(series, config)?;
    let fit = adf_regression(series, config.deterministic, lags, lags + 1)?;
    let statistic = fit.t_stats[0];
    let critical_values = df_critical_values(cv_case, cv_vars, fit.nobs)?;
    let decision = if statistic < config.level.pick(&critical_values) {
        Decision::RejectUnitRoot
    } else {
        Decision::FailToReject
    };
    Ok(AdfResult {
        statistic,
        lags_used: lags,
        nobs: fit.nobs,
        deterministic: config.deterministic,
        critical_values,
        level: config.level,
        decision,
    })
}

/// Augmented Dickey-Fuller test with MacKinnon response-surface critical values.
///
/// The decision is left-tailed: the unit root is rejected when the statistic
/// is below the critical value at `config.level`.
pub fn adf_test(series: &[f64], deterministic: Deterministic, max_lags: usize, lag_rule: LagRule) -> Result<AdfResult> {
    adf_test_with(
        series,
        &AdfConfig {
            deterministic,
            max_lags,
            lag_rule,
            ..AdfConfig::default()
        },
    )
}

pub fn adf_test_with(series: &[f64], config: &AdfConfig) -> Result<AdfResult> {
    adf_with_table(series, config, config.deterministic, 1)
}

/// Integration order with the default ADF configuration.
pub fn classify_integration(series: &[f64], max_order: usize) -> Result<IntegrationOrder> {
    classify_integration_with(series, max_order, &AdfConfig::default())
}

pub fn classify_integration_with(series: &[f64], max_order: usize, config: &AdfConfig) -> Result<IntegrationOrder> {
    if max_order == 0 {
        return Err(Error::InvalidInput("max_order must be at least 1".into()));
    }
    for d in 0..=max_order {
        let x = if d == 0 { series.to_vec() } else { difference(series, d)? };
        if adf_test_with(&x, config)?.rejects() {
            return Ok(IntegrationOrder::Order(d));
        }
    }
    Ok(IntegrationOrder::Inconclusive { max_order })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgResult {
    pub dependent: String,
    pub regressors: Vec<String>,
    /// Levels regression of the dependent variable on the others plus a constant.
    pub step1: RegressionResult,
    /// ADF on the step-1 residuals, no deterministic terms, Engle-Granger critical values.
    pub residual_test: AdfResult,
    pub cointegrated: bool,
}

/// Engle-Granger two-step test with `dependent` on the left-hand side.
///
/// The residual ADF uses the lag settings of `config` but always runs without
/// deterministic terms; its critical values come from the constant-case
/// cointegration surface keyed by the number of variables in the levels
/// regression. Integration orders of the inputs are not checked here.
pub fn engle_granger(panel: &Panel, dependent: &str, config: &AdfConfig) -> Result<EgResult> {
    if panel.nvars() < 2 {
        return Err(Error::InvalidInput("Engle-Granger needs at least two variables".into()));
    }
    let dep = panel
        .position(dependent)
        .ok_or_else(|| Error::InvalidInput(format!("unknown variable {dependent:?}")))?;

    let regressors: Vec<String> = panel
        .names()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != dep)
        .map(|(_, n)| n.clone())
        .collect();
    let mut names = regressors.clone();
    names.push("const".into());
    let mut cols: Vec<Vec<f64>> = regressors
        .iter()
        .map(|n| panel.column_by_name(n).expect("known variable").to_vec())
        .collect();
    cols.push(vec![1.0; panel.len()]);

    let step1 = ols(panel.column(dep), &DesignMatrix::from_columns(names, &cols)?)?;
    let residual_config = AdfConfig {
        deterministic: Deterministic::None,
        ..*config
    };
    let residual_test = adf_with_table(&step1.residuals, &residual_config, Deterministic::Constant, panel.nvars())?;
    let cointegrated = residual_test.rejects();
    Ok(EgResult {
        dependent: dependent.to_string(),
        regressors,
        step1,
        residual_test,
        cointegrated,
    })
}
