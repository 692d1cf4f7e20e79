//! Johansen reduced-rank analysis and VECM estimation.
//!
//! The short-run dynamics (lagged differences, constant, seasonal dummies) are
//! concentrated out of `Δy_t` and `y_{t-1}`; the cointegrating space is then
//! read off the generalized eigenproblem `|λ S11 − S10 S00⁻¹ S01| = 0`, solved
//! by Cholesky reduction of `S11` to a symmetric standard eigenproblem.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataio::{Panel, QuarterIndex};
use crate::error::{Error, Result};
use crate::linalg::{self, serde_rows};
use crate::regress::{ols, RegressionResult, RCOND_THRESHOLD};
use crate::report::{fmt_num, TextTable};
use crate::series::{build_vecm_design, dummies_for, DesignMatrix, Seasonality, DUMMY_NAMES};
pub use crate::tables::CriticalTable;
use crate::tables::trace_critical_values;

/// Residuals of the multivariate regression of `y` on `x`.
fn concentrate(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut scaled = x.clone();
    for mut col in scaled.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::Conditioning("short-run regressor column is identically zero".into()));
        }
        col.scale_mut(1.0 / norm);
    }
    if linalg::reciprocal_condition(&scaled) < RCOND_THRESHOLD {
        return Err(Error::Conditioning("short-run regressors are collinear".into()));
    }
    let q = scaled.qr().q();
    Ok(y - &q * (q.transpose() * y))
}

/// Reciprocal condition number of a covariance matrix after scaling it to a
/// correlation matrix, so that unit choices do not matter.
fn correlation_rcond(s: &DMatrix<f64>) -> f64 {
    let d: Vec<f64> = s.diagonal().iter().map(|v| v.sqrt()).collect();
    if d.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return 0.0;
    }
    let c = DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| s[(i, j)] / (d[i] * d[j]));
    linalg::reciprocal_condition(&c)
}

struct ReducedRank {
    t_eff: usize,
    eigenvalues: Vec<f64>,
    /// Eigenvectors with `Vᵀ S11 V = I`.
    vectors: DMatrix<f64>,
    s01: DMatrix<f64>,
    s11: DMatrix<f64>,
}

fn reduced_rank(panel: &Panel, k: usize, seasonality: Seasonality) -> Result<ReducedRank> {
    let p = panel.nvars();
    let dummies = dummies_for(panel.index(), seasonality)?;
    let design = build_vecm_design(panel, k, &[], dummies.as_ref())?;
    let t_eff = design.t_eff();
    if t_eff <= p * (k + 1) + 5 {
        return Err(Error::InsufficientSample(format!(
            "{t_eff} usable rows; the rank test needs more than {}",
            p * (k + 1) + 5
        )));
    }

    let z2 = design.design.data();
    let r0 = concentrate(&design.responses, z2)?;
    let r1 = concentrate(&design.lagged_levels, z2)?;
    let t = t_eff as f64;
    let s00 = linalg::symmetrize(&(r0.transpose() * &r0 / t));
    let s11 = linalg::symmetrize(&(r1.transpose() * &r1 / t));
    let s01 = r0.transpose() * &r1 / t;

    for (name, s) in [("S00", &s00), ("S11", &s11)] {
        if correlation_rcond(s) < RCOND_THRESHOLD {
            return Err(Error::Conditioning(format!("{name} is numerically singular")));
        }
    }

    let s00_chol = nalgebra::Cholesky::new(s00.clone()).ok_or_else(|| Error::Conditioning("S00 is not positive definite".into()))?;
    let a = linalg::symmetrize(&(s01.transpose() * s00_chol.solve(&s01)));
    let (mut eigenvalues, vectors) = linalg::generalized_symmetric_eigen(&a, &s11).map_err(|e| match e {
        Error::NotPositiveDefinite(_) => Error::Conditioning("S11 is not positive definite".into()),
        other => other,
    })?;
    for l in eigenvalues.iter_mut() {
        if *l >= 1.0 {
            return Err(Error::Conditioning(format!("eigenvalue {l} is not below one")));
        }
        *l = l.max(0.0);
    }
    Ok(ReducedRank {
        t_eff,
        eigenvalues,
        vectors,
        s01,
        s11,
    })
}

/// Scales every column so that its first non-negligible coordinate is one.
fn normalize_first_nonzero(beta: &mut DMatrix<f64>) {
    for mut col in beta.column_iter_mut() {
        let peak = col.amax();
        if let Some(lead) = col.iter().copied().find(|v| v.abs() > 1e-10 * peak) {
            col.scale_mut(1.0 / lead);
        }
    }
}

/// Phillips normalization `β (β_{1:r,1:r})⁻¹` when the leading block is
/// well conditioned, first-nonzero scaling otherwise.
fn normalize_cointegrating(beta: &DMatrix<f64>) -> DMatrix<f64> {
    let r = beta.ncols();
    if r == 0 {
        return beta.clone();
    }
    let block = beta.view((0, 0), (r, r)).clone_owned();
    if linalg::reciprocal_condition(&block) > 1e-10 {
        if let Some(inv) = block.try_inverse() {
            return beta * inv;
        }
    }
    let mut out = beta.clone();
    normalize_first_nonzero(&mut out);
    out
}

fn adjustment_loadings(rr: &ReducedRank, beta: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gram = beta.transpose() * &rr.s11 * beta;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("β' S11 β is singular".into()))?;
    Ok(&rr.s01 * beta * inv)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    pub variable_names: Vec<String>,
    pub k: usize,
    pub seasonality: Seasonality,
    pub t_eff: usize,
    /// Squared canonical correlations, descending, in `[0, 1)`.
    pub eigenvalues: Vec<f64>,
    /// `trace_stats[r]` tests `H0: rank ≤ r`.
    pub trace_stats: Vec<f64>,
    pub critical_values_5pct: Vec<f64>,
    pub table: CriticalTable,
    /// Candidate cointegrating vectors (columns), first nonzero coordinate = 1.
    #[serde(with = "serde_rows")]
    pub beta: DMatrix<f64>,
    /// `S01 β (β' S11 β)⁻¹` for the full set of candidate vectors.
    #[serde(with = "serde_rows")]
    pub alpha: DMatrix<f64>,
    pub selected_rank: usize,
}

impl JohansenResult {
    /// `true` where `H0: rank ≤ r` is rejected at 5%.
    pub fn rejections(&self) -> Vec<bool> {
        self.trace_stats
            .iter()
            .zip(&self.critical_values_5pct)
            .map(|(s, c)| s > c)
            .collect()
    }

    pub fn render(&self) -> String {
        let mut t = TextTable::new(vec!["Null", "Eigenvalue", "Trace statistic", "Critical value @ 5%", "Result"]);
        let p = self.trace_stats.len();
        for r in 0..p {
            let null = if r == 0 { "r = 0".to_string() } else { format!("r <= {r}") };
            let result = if self.trace_stats[r] > self.critical_values_5pct[r] {
                "Reject the null"
            } else {
                "Fail to reject the null"
            };
            t.row(vec![
                null,
                format!("{:.4}", self.eigenvalues[r]),
                format!("{:.2}", self.trace_stats[r]),
                format!("{:.2}", self.critical_values_5pct[r]),
                result.to_string(),
            ]);
        }
        format!(
            "{}Selected rank: {}   (k = {}, T_eff = {}, table = {:?})\n",
            t.render(),
            self.selected_rank,
            self.k,
            self.t_eff,
            self.table
        )
    }
}

/// Trace test for the cointegrating rank.
pub fn johansen_trace(panel: &Panel, k: usize, seasonality: Seasonality, table: CriticalTable) -> Result<JohansenResult> {
    let p = panel.nvars();
    let critical_values_5pct = trace_critical_values(table, p)?;
    let rr = reduced_rank(panel, k, seasonality)?;

    let t = rr.t_eff as f64;
    let trace_stats: Vec<f64> = (0..p)
        .map(|r| -t * rr.eigenvalues[r..].iter().map(|l| (1.0 - l).ln()).sum::<f64>())
        .collect();

    let mut beta = rr.vectors.clone();
    normalize_first_nonzero(&mut beta);
    let alpha = adjustment_loadings(&rr, &beta)?;
    let selected_rank = select_rank(&trace_stats, &critical_values_5pct);

    Ok(JohansenResult {
        variable_names: panel.names().to_vec(),
        k,
        seasonality,
        t_eff: rr.t_eff,
        eigenvalues: rr.eigenvalues,
        trace_stats,
        critical_values_5pct,
        table,
        beta,
        alpha,
        selected_rank,
    })
}

/// First `r` whose trace statistic does not exceed its critical value; `p` if none.
pub fn select_rank(trace_stats: &[f64], critical_values: &[f64]) -> usize {
    trace_stats
        .iter()
        .zip(critical_values)
        .position(|(s, c)| s <= c)
        .unwrap_or(trace_stats.len())
}

/// Multivariate Schwarz criterion `log|Σ̂| + (k'/T) log T`.
pub fn msbic(residual_cov: &DMatrix<f64>, k_prime: usize, t_eff: usize) -> Result<f64> {
    if t_eff == 0 {
        return Err(Error::InvalidInput("MSBIC needs a positive sample size".into()));
    }
    let t = t_eff as f64;
    Ok(linalg::log_det_spd(residual_cov, "residual covariance")? + k_prime as f64 / t * t.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagCriterion {
    pub k: usize,
    /// Parameters in the system: equations × regressors per equation.
    pub k_prime: usize,
    pub msbic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub selected: usize,
    /// Common sample size used for every candidate.
    pub t_eff: usize,
    pub criteria: Vec<LagCriterion>,
}

impl LagSelection {
    pub fn render(&self) -> String {
        let mut t = TextTable::new(vec!["k", "k'", "MSBIC", ""]);
        for c in &self.criteria {
            let mark = if c.k == self.selected { "*" } else { "" };
            t.row(vec![c.k.to_string(), c.k_prime.to_string(), format!("{:.6}", c.msbic), mark.to_string()]);
        }
        format!("{}Selected k = {} (common sample T = {})\n", t.render(), self.selected, self.t_eff)
    }
}

/// Chooses the number of differenced lags by MSBIC.
///
/// Every candidate `k = 1..=max_k` is fitted as an unrestricted VAR in
/// differences plus `y_{t-1}` on the same sample, the one feasible for
/// `max_k`. Ties go to the smaller `k`.
pub fn select_lag(panel: &Panel, max_k: usize, seasonality: Seasonality) -> Result<LagSelection> {
    if max_k == 0 {
        return Err(Error::InvalidInput("max_k must be at least 1".into()));
    }
    let p = panel.nvars();
    let dummies = dummies_for(panel.index(), seasonality)?;
    // the largest design must leave at least p residual degrees of freedom
    // for the residual covariance to be positive definite
    let widest = p * max_k + 1 + if seasonality.is_on() { 3 } else { 0 } + p;
    if panel.len() < max_k + 1 + widest + p {
        return Err(Error::InsufficientSample(format!(
            "{} observations cannot support {max_k} differenced lags with {widest} regressors per equation",
            panel.len()
        )));
    }
    let rows = panel.len() - max_k - 1;
    let mut criteria = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        let d = build_vecm_design(panel, k, &[], dummies.as_ref())?;
        let skip = max_k - k;
        let base = d.design.data().rows(skip, rows);
        let ncols = base.ncols() + p;
        let mut x = DMatrix::zeros(rows, ncols);
        x.view_mut((0, 0), (rows, base.ncols())).copy_from(&base);
        x.view_mut((0, base.ncols()), (rows, p)).copy_from(&d.lagged_levels.rows(skip, rows));
        let y = d.responses.rows(skip, rows).clone_owned();
        let resid = concentrate(&y, &x)?;
        let cov = resid.transpose() * &resid / rows as f64;
        let k_prime = p * ncols;
        criteria.push(LagCriterion {
            k,
            k_prime,
            msbic: msbic(&cov, k_prime, rows)?,
        });
    }
    let selected = criteria
        .iter()
        .fold(None::<&LagCriterion>, |best, c| match best {
            Some(b) if b.msbic <= c.msbic => Some(b),
            _ => Some(c),
        })
        .map(|c| c.k)
        .expect("at least one candidate");
    Ok(LagSelection {
        selected,
        t_eff: rows,
        criteria,
    })
}

/// Estimated rank-`r` error-correction model with `k` differenced lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmModel {
    pub variable_names: Vec<String>,
    pub first_quarter: QuarterIndex,
    pub last_quarter: QuarterIndex,
    pub k: usize,
    pub rank: usize,
    pub seasonality: Seasonality,
    pub t_eff: usize,
    pub eigenvalues: Vec<f64>,
    /// `p × r` cointegrating vectors.
    #[serde(with = "serde_rows")]
    pub beta: DMatrix<f64>,
    /// `p × r` adjustment loadings, the `ec` coefficients of each equation.
    #[serde(with = "serde_rows")]
    pub alpha: DMatrix<f64>,
    /// Short-run matrices `Γ_1..Γ_k`; row = equation, column = lagged variable.
    #[serde(with = "serde_rows::vec")]
    pub gamma: Vec<DMatrix<f64>>,
    pub constant: Vec<f64>,
    /// `p × 3` seasonal-dummy coefficients (`p × 0` without dummies).
    #[serde(with = "serde_rows")]
    pub dummy_coefficients: DMatrix<f64>,
    /// Residual cross-products divided by `T_eff`.
    #[serde(with = "serde_rows")]
    pub residual_cov: DMatrix<f64>,
    pub equations: Vec<RegressionResult>,
}

impl VecmModel {
    pub fn nvars(&self) -> usize {
        self.variable_names.len()
    }

    /// Long-run matrix `Π = α β'`.
    pub fn pi(&self) -> DMatrix<f64> {
        &self.alpha * self.beta.transpose()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One coefficient table per equation, `d.<var>` as the dependent variable.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, eq) in self.variable_names.iter().zip(&self.equations) {
            out.push_str(&eq.render(&format!("d.{name} as the dependent variable")));
            out.push('\n');
        }
        out.push_str("Cointegrating vectors (columns):\n");
        let mut t = TextTable::new(
            std::iter::once(String::new())
                .chain((1..=self.rank).map(|j| format!("ec{j}")))
                .collect(),
        );
        for (i, name) in self.variable_names.iter().enumerate() {
            t.row(
                std::iter::once(name.clone())
                    .chain(self.beta.row(i).iter().map(|v| fmt_num(*v)))
                    .collect(),
            );
        }
        out.push_str(&t.render());
        out
    }
}

/// Fits the VECM equation by equation with `ec_j(t) = β_j' y_{t-1}` regressors.
pub fn estimate_vecm(panel: &Panel, rank: usize, k: usize, seasonality: Seasonality) -> Result<VecmModel> {
    let p = panel.nvars();
    if rank > p {
        return Err(Error::InvalidInput(format!("rank {rank} exceeds the number of variables {p}")));
    }
    let rr = reduced_rank(panel, k, seasonality)?;
    let beta = normalize_cointegrating(&rr.vectors.columns(0, rank).clone_owned());

    let levels = panel.levels_matrix();
    let ec_terms: Vec<Vec<f64>> = (0..rank)
        .map(|j| (&levels * beta.column(j)).iter().copied().collect())
        .collect();
    let dummies = dummies_for(panel.index(), seasonality)?;
    let design = build_vecm_design(panel, k, &ec_terms, dummies.as_ref())?;

    let equations = (0..p)
        .map(|j| ols(&design.response(j), &design.design))
        .collect::<Result<Vec<_>>>()?;
    let VecmParts {
        gamma,
        constant,
        dummy_coefficients,
        alpha,
    } = unpack(&equations, &design.design, panel.names(), k, rank, seasonality.is_on());

    let t_eff = design.t_eff();
    let resid = DMatrix::from_fn(t_eff, p, |t, j| equations[j].residuals[t]);
    let residual_cov = linalg::symmetrize(&(resid.transpose() * &resid / t_eff as f64));

    Ok(VecmModel {
        variable_names: panel.names().to_vec(),
        first_quarter: panel.first(),
        last_quarter: panel.last(),
        k,
        rank,
        seasonality,
        t_eff,
        eigenvalues: rr.eigenvalues,
        beta,
        alpha,
        gamma,
        constant,
        dummy_coefficients,
        residual_cov,
        equations,
    })
}

struct VecmParts {
    gamma: Vec<DMatrix<f64>>,
    constant: Vec<f64>,
    dummy_coefficients: DMatrix<f64>,
    alpha: DMatrix<f64>,
}

fn unpack(
    equations: &[RegressionResult],
    design: &DesignMatrix,
    names: &[String],
    k: usize,
    rank: usize,
    dummies: bool,
) -> VecmParts {
    let p = names.len();
    let col = |label: &str| {
        design
            .names()
            .iter()
            .position(|n| n == label)
            .expect("regressor present in the VECM layout")
    };
    let coef = |eq: usize, label: &str| equations[eq].coefficients[col(label)];

    let gamma = (1..=k)
        .map(|i| DMatrix::from_fn(p, p, |eq, v| coef(eq, &format!("d.{}.l{i}", names[v]))))
        .collect();
    let constant = (0..p).map(|eq| coef(eq, "const")).collect();
    let dummy_coefficients = if dummies {
        DMatrix::from_fn(p, 3, |eq, d| coef(eq, DUMMY_NAMES[d]))
    } else {
        DMatrix::zeros(p, 0)
    };
    let alpha = DMatrix::from_fn(p, rank, |eq, j| coef(eq, &format!("ec{}", j + 1)));
    VecmParts {
        gamma,
        constant,
        dummy_coefficients,
        alpha,
    }
}
