//! Level-VAR representation of a fitted VECM and what follows from it:
//! forecasts, orthogonalized impulse responses and variance decompositions.
//!
//! Impulse responses and decompositions are expressed for the differenced
//! variables `d.<var>`. Level responses are the running sums of the
//! differenced ones, see [`IrfResult::cumulative`].

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataio::{Panel, QuarterIndex};
use crate::error::{Error, Result};
use crate::johansen::VecmModel;
use crate::linalg::{self, serde_rows};
use crate::report::TextTable;
use crate::series::{dummies_for, DummySet, Seasonality};

/// `y_t = c + D d_t + Σ_{i=1..k+1} A_i y_{t-i} + ε_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelVarModel {
    pub variable_names: Vec<String>,
    #[serde(with = "serde_rows::vec")]
    pub a: Vec<DMatrix<f64>>,
    pub constant: Vec<f64>,
    pub seasonality: Seasonality,
    /// `p × 3`, or `p × 0` without seasonal dummies.
    #[serde(with = "serde_rows")]
    pub dummy_coefficients: DMatrix<f64>,
    #[serde(with = "serde_rows")]
    pub residual_cov: DMatrix<f64>,
}

impl LevelVarModel {
    pub fn nvars(&self) -> usize {
        self.variable_names.len()
    }

    /// Number of level lags, `k + 1`.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    fn position(&self, name: &str) -> Result<usize> {
        let bare = name.strip_prefix("d.").unwrap_or(name);
        self.variable_names
            .iter()
            .position(|v| v == bare)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variable {name:?}")))
    }

    /// Resolves an ordering given by variable names into model positions.
    fn resolve_ordering(&self, ordering: &[String]) -> Result<Vec<usize>> {
        let idx = ordering.iter().map(|n| self.position(n)).collect::<Result<Vec<_>>>()?;
        let mut seen = vec![false; self.nvars()];
        for &i in &idx {
            seen[i] = true;
        }
        if idx.len() != self.nvars() || seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput(format!(
                "ordering {ordering:?} is not a permutation of {:?}",
                self.variable_names
            )));
        }
        Ok(idx)
    }

    /// Lower-triangular factor of the residual covariance under `ordering`,
    /// expressed in model coordinates (column `m` is the shock to variable `m`).
    pub fn orthogonal_factor(&self, ordering: &[String]) -> Result<DMatrix<f64>> {
        let perm = self.resolve_ordering(ordering)?;
        let p = self.nvars();
        let permuted = DMatrix::from_fn(p, p, |i, j| self.residual_cov[(perm[i], perm[j])]);
        let l = linalg::cholesky_lower(&permuted, "residual covariance")?;
        let mut out = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                out[(perm[i], perm[j])] = l[(i, j)];
            }
        }
        Ok(out)
    }

    /// Level moving-average coefficients `Φ_0 = I`, `Φ_s = Σ_i Φ_{s-i} A_i`.
    pub fn ma_coefficients(&self, horizon: usize) -> Vec<DMatrix<f64>> {
        let p = self.nvars();
        let mut phi: Vec<DMatrix<f64>> = vec![DMatrix::identity(p, p)];
        for s in 1..=horizon {
            let mut next = DMatrix::zeros(p, p);
            for (i, a) in self.a.iter().enumerate().take(s) {
                next += &phi[s - i - 1] * a;
            }
            phi.push(next);
        }
        phi
    }

    /// Moving-average coefficients of the differenced system, `Φ_s − Φ_{s-1}`.
    pub fn difference_ma_coefficients(&self, horizon: usize) -> Vec<DMatrix<f64>> {
        let phi = self.ma_coefficients(horizon);
        (0..=horizon)
            .map(|s| if s == 0 { phi[0].clone() } else { &phi[s] - &phi[s - 1] })
            .collect()
    }

    fn deterministic(&self, dummies: Option<[f64; 3]>) -> Vec<f64> {
        let mut c = self.constant.clone();
        if let Some(d) = dummies {
            if self.dummy_coefficients.ncols() == 3 {
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj += (0..3).map(|m| self.dummy_coefficients[(j, m)] * d[m]).sum::<f64>();
                }
            }
        }
        c
    }
}

/// Rewrites `Δy_t = c + D d_t + αβ' y_{t-1} + Σ Γ_i Δy_{t-i}` in levels.
pub fn vecm_to_var(model: &VecmModel) -> LevelVarModel {
    let p = model.nvars();
    let k = model.gamma.len();
    let mut a = Vec::with_capacity(k + 1);
    a.push(DMatrix::identity(p, p) + model.pi() + &model.gamma[0]);
    for i in 1..k {
        a.push(&model.gamma[i] - &model.gamma[i - 1]);
    }
    a.push(-&model.gamma[k - 1]);
    LevelVarModel {
        variable_names: model.variable_names.clone(),
        a,
        constant: model.constant.clone(),
        seasonality: model.seasonality,
        dummy_coefficients: model.dummy_coefficients.clone(),
        residual_cov: model.residual_cov.clone(),
    }
}

/// Iterates the level recursion `h` steps from `history` (oldest first).
///
/// `dummies`, when present, must carry one row per forecast step.
pub fn forecast_with_dummies(
    model: &LevelVarModel,
    history: &[Vec<f64>],
    h: usize,
    dummies: Option<&DummySet>,
) -> Result<DMatrix<f64>> {
    let (p, order) = (model.nvars(), model.order());
    if history.len() < order {
        return Err(Error::InsufficientSample(format!(
            "forecasting needs {order} level rows of history, got {}",
            history.len()
        )));
    }
    if history.iter().any(|row| row.len() != p) {
        return Err(Error::InvalidInput("history rows do not match the model dimension".into()));
    }
    if let Some(d) = dummies {
        if d.len() != h {
            return Err(Error::InvalidInput(format!("{} dummy rows for a {h}-step forecast", d.len())));
        }
    }
    let mut path: Vec<Vec<f64>> = history[history.len() - order..].to_vec();
    let mut out = DMatrix::zeros(h, p);
    for step in 0..h {
        let mut y = model.deterministic(dummies.map(|d| d.row(step)));
        for (i, a) in model.a.iter().enumerate() {
            let past = &path[path.len() - 1 - i];
            for (r, yr) in y.iter_mut().enumerate() {
                *yr += (0..p).map(|c| a[(r, c)] * past[c]).sum::<f64>();
            }
        }
        for (j, v) in y.iter().enumerate() {
            out[(step, j)] = *v;
        }
        path.push(y);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub variable_names: Vec<String>,
    pub quarters: Vec<QuarterIndex>,
    /// `h × p` level forecasts.
    #[serde(with = "serde_rows")]
    pub point_forecasts: DMatrix<f64>,
    #[serde(default, with = "opt_rows")]
    pub actuals: Option<DMatrix<f64>>,
    pub rmse: Option<Vec<f64>>,
    /// Percent.
    pub mape: Option<Vec<f64>>,
}

mod opt_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::linalg::serde_rows")] DMatrix<f64>);

    pub fn serialize<S: Serializer>(m: &Option<DMatrix<f64>>, s: S) -> Result<S::Ok, S::Error> {
        m.clone().map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DMatrix<f64>>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl ForecastResult {
    pub fn horizon(&self) -> usize {
        self.quarters.len()
    }

    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.variable_names.iter().position(|v| v == name)?;
        Some(self.point_forecasts.column(j).iter().copied().collect())
    }

    /// Attaches realized values for the forecast quarters and scores them.
    pub fn evaluate(mut self, actual: &Panel) -> Result<Self> {
        let (Some(&from), Some(&to)) = (self.quarters.first(), self.quarters.last()) else {
            return Ok(self);
        };
        let window = actual.span(from, to)?.select(&self.variable_names)?;
        let actuals = window.levels_matrix();
        let mut rmses = Vec::new();
        let mut mapes = Vec::new();
        for j in 0..self.variable_names.len() {
            let a: Vec<f64> = actuals.column(j).iter().copied().collect();
            let f: Vec<f64> = self.point_forecasts.column(j).iter().copied().collect();
            rmses.push(rmse(&a, &f)?);
            mapes.push(mape(&a, &f).map_err(|e| match e {
                Error::ZeroActual { at } => Error::ZeroActual {
                    at: at
                        .parse::<usize>()
                        .ok()
                        .map(|i| format!("{} in {}", self.quarters[i], self.variable_names[j]))
                        .unwrap_or(at),
                },
                other => other,
            })?);
        }
        self.actuals = Some(actuals);
        self.rmse = Some(rmses);
        self.mape = Some(mapes);
        Ok(self)
    }

    /// Quarter-by-quarter actual/predicted table followed by RMSE and MAPE.
    pub fn render(&self) -> String {
        let mut header = vec!["Quarter".to_string()];
        for v in &self.variable_names {
            if self.actuals.is_some() {
                header.push(format!("{v} actual"));
            }
            header.push(format!("{v} predicted"));
        }
        let mut t = TextTable::new(header);
        for (s, q) in self.quarters.iter().enumerate() {
            let mut row = vec![q.to_string()];
            for j in 0..self.variable_names.len() {
                if let Some(a) = &self.actuals {
                    row.push(format!("{:.2}", a[(s, j)]));
                }
                row.push(format!("{:.2}", self.point_forecasts[(s, j)]));
            }
            t.row(row);
        }
        if let (Some(r), Some(m)) = (&self.rmse, &self.mape) {
            let mut rr = vec!["R.M.S.E".to_string()];
            let mut mr = vec!["M.A.P.E".to_string()];
            for j in 0..self.variable_names.len() {
                rr.extend([String::new(), format!("{:.2}", r[j])]);
                mr.extend([String::new(), format!("{:.2}%", m[j])]);
            }
            t.row(rr);
            t.row(mr);
        }
        t.render()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["quarter".to_string()];
        for v in &self.variable_names {
            header.push(format!("{v}.forecast"));
            if self.actuals.is_some() {
                header.push(format!("{v}.actual"));
            }
        }
        w.write_record(&header)?;
        for (s, q) in self.quarters.iter().enumerate() {
            let mut row = vec![q.to_string()];
            for j in 0..self.variable_names.len() {
                row.push(self.point_forecasts[(s, j)].to_string());
                if let Some(a) = &self.actuals {
                    row.push(a[(s, j)].to_string());
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `h`-step level forecast from the end of `history`, with seasonal dummies
/// generated from the calendar of the forecast quarters.
pub fn forecast(model: &LevelVarModel, history: &Panel, h: usize) -> Result<ForecastResult> {
    let history = history.select(&model.variable_names)?;
    let quarters: Vec<QuarterIndex> = (1..=h as i64).map(|i| history.last().offset(i)).collect();
    let dummies = if h == 0 { None } else { dummies_for(&quarters, model.seasonality)? };
    let rows: Vec<Vec<f64>> = (0..history.len()).map(|t| history.row(t)).collect();
    let point_forecasts = forecast_with_dummies(model, &rows, h, dummies.as_ref())?;
    Ok(ForecastResult {
        variable_names: model.variable_names.clone(),
        quarters,
        point_forecasts,
        actuals: None,
        rmse: None,
        mape: None,
    })
}

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.is_empty() || actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "accuracy measures need equal nonempty series, got {} and {}",
            actual.len(),
            predicted.len()
        )));
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sse: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum();
    Ok((sse / actual.len() as f64).sqrt())
}

/// Mean absolute percentage error, in percent. A zero actual is reported by
/// its position.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let mut total = 0.0;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if *a == 0.0 {
            return Err(Error::ZeroActual { at: i.to_string() });
        }
        total += ((a - p) / a).abs();
    }
    Ok(100.0 * total / actual.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub impulse: String,
    pub ordering: Vec<String>,
    pub variable_names: Vec<String>,
    /// `(H+1) × p`; row `s` holds the responses of `d.<var>` at horizon `s`
    /// to a one-standard-deviation orthogonal shock.
    #[serde(with = "serde_rows")]
    pub responses: DMatrix<f64>,
}

impl IrfResult {
    pub fn horizon(&self) -> usize {
        self.responses.nrows() - 1
    }

    /// Level responses: running sums of the differenced ones.
    pub fn cumulative(&self) -> DMatrix<f64> {
        let mut out = self.responses.clone();
        for s in 1..out.nrows() {
            for j in 0..out.ncols() {
                out[(s, j)] += out[(s - 1, j)];
            }
        }
        out
    }

    pub fn response(&self, name: &str) -> Option<Vec<f64>> {
        let bare = name.strip_prefix("d.").unwrap_or(name);
        let j = self.variable_names.iter().position(|v| v == bare)?;
        Some(self.responses.column(j).iter().copied().collect())
    }

    pub fn write_csv<W: Write>(&self, writer: W, cumulative: bool) -> Result<()> {
        let data = if cumulative { self.cumulative() } else { self.responses.clone() };
        let mut w = csv::Writer::from_writer(writer);
        let prefix = if cumulative { "" } else { "d." };
        let mut header = vec!["horizon".to_string()];
        header.extend(self.variable_names.iter().map(|v| format!("{prefix}{v}")));
        w.write_record(&header)?;
        for s in 0..data.nrows() {
            let mut row = vec![s.to_string()];
            row.extend(data.row(s).iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Orthogonalized impulse responses to a shock in `impulse`, horizons `0..=horizon`.
pub fn irf(model: &LevelVarModel, impulse: &str, horizon: usize, ordering: &[String]) -> Result<IrfResult> {
    let m = model.position(impulse)?;
    let p_factor = model.orthogonal_factor(ordering)?;
    let psi = model.difference_ma_coefficients(horizon);
    let shock = p_factor.column(m).clone_owned();
    let mut responses = DMatrix::zeros(horizon + 1, model.nvars());
    for (s, ps) in psi.iter().enumerate() {
        responses.row_mut(s).copy_from(&(ps * &shock).transpose());
    }
    Ok(IrfResult {
        impulse: model.variable_names[m].clone(),
        ordering: ordering.to_vec(),
        variable_names: model.variable_names.clone(),
        responses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FevdMatrix {
    pub variable_names: Vec<String>,
    pub ordering: Vec<String>,
    /// One `H × p` matrix per target variable: row `h-1` holds the shares of
    /// the `h`-step forecast-error variance due to each variable's shock.
    #[serde(with = "serde_rows::vec")]
    pub proportions: Vec<DMatrix<f64>>,
}

impl FevdMatrix {
    pub fn horizon(&self) -> usize {
        self.proportions.first().map_or(0, |m| m.nrows())
    }

    /// Shares for `target` at horizon `h` (1-based).
    pub fn row(&self, target: &str, h: usize) -> Option<Vec<f64>> {
        let bare = target.strip_prefix("d.").unwrap_or(target);
        let j = self.variable_names.iter().position(|v| v == bare)?;
        (1..=self.horizon())
            .contains(&h)
            .then(|| self.proportions[j].row(h - 1).iter().copied().collect())
    }

    /// One table per target, horizons as rows and shocks as columns.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (j, target) in self.variable_names.iter().enumerate() {
            out.push_str(&format!("Variance decomposition of d.{target}\n"));
            let mut header = vec!["Horizon".to_string()];
            header.extend(self.variable_names.iter().map(|v| format!("d.{v}")));
            let mut t = TextTable::new(header);
            for h in 0..self.horizon() {
                let mut row = vec![(h + 1).to_string()];
                row.extend(self.proportions[j].row(h).iter().map(|v| format!("{v:.4}")));
                t.row(row);
            }
            out.push_str(&t.render());
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["target".to_string(), "horizon".to_string()];
        header.extend(self.variable_names.iter().map(|v| format!("d.{v}")));
        w.write_record(&header)?;
        for (j, target) in self.variable_names.iter().enumerate() {
            for h in 0..self.horizon() {
                let mut row = vec![format!("d.{target}"), (h + 1).to_string()];
                row.extend(self.proportions[j].row(h).iter().map(|v| v.to_string()));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Variance decomposition with the model's own variable order.
pub fn fevd(model: &LevelVarModel, horizon: usize) -> Result<FevdMatrix> {
    fevd_ordered(model, horizon, &model.variable_names)
}

/// Variance decomposition of the differenced variables under `ordering`.
pub fn fevd_ordered(model: &LevelVarModel, horizon: usize, ordering: &[String]) -> Result<FevdMatrix> {
    if horizon == 0 {
        return Err(Error::InvalidInput("variance decomposition needs a horizon of at least 1".into()));
    }
    let p = model.nvars();
    let p_factor = model.orthogonal_factor(ordering)?;
    let theta: Vec<DMatrix<f64>> = model
        .difference_ma_coefficients(horizon - 1)
        .iter()
        .map(|ps| ps * &p_factor)
        .collect();
    let mut proportions = vec![DMatrix::zeros(horizon, p); p];
    let mut acc = DMatrix::<f64>::zeros(p, p);
    for (h, th) in theta.iter().enumerate() {
        acc += th.component_mul(th);
        for (j, prop) in proportions.iter_mut().enumerate() {
            let total: f64 = acc.row(j).sum();
            for m in 0..p {
                prop[(h, m)] = acc[(j, m)] / total;
            }
        }
    }
    Ok(FevdMatrix {
        variable_names: model.variable_names.clone(),
        ordering: ordering.to_vec(),
        proportions,
    })
}
