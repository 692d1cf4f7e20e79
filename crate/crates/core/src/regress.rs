//! Ordinary least squares with coefficient inference.
//!
//! This is the single estimation engine behind the Engle-Granger levels
//! regression, every ADF regression and each VECM equation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};
use crate::report::{fmt_num, fmt_p, stars, TextTable};
use crate::series::DesignMatrix;

/// Designs whose reciprocal condition number (after unit-norm column scaling)
/// falls below this are rejected as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FStat {
    pub value: f64,
    pub df1: usize,
    pub df2: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub regressor_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub nobs: usize,
    pub df_resid: usize,
    pub rss: f64,
    /// `RSS / (n - k')`.
    pub sigma2: f64,
    /// Centered when the design holds a constant column, uncentered otherwise.
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub has_intercept: bool,
    /// Joint test of all non-constant coefficients.
    pub f_stat: Option<FStat>,
}

impl RegressionResult {
    pub fn position(&self, name: &str) -> Option<usize> {
        self.regressor_names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.coefficients[i])
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.p_values[i])
    }

    pub fn t_stat(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.t_stats[i])
    }

    /// Fixed-width coefficient table with significance codes.
    pub fn render(&self, title: &str) -> String {
        let mut t = TextTable::new(vec!["", "Estimate", "Std. Error", "T-Statistic", "Pr(>|t|)", ""]);
        for i in 0..self.coefficients.len() {
            t.row(vec![
                self.regressor_names[i].clone(),
                fmt_num(self.coefficients[i]),
                fmt_num(self.standard_errors[i]),
                format!("{:.2}", self.t_stats[i]),
                fmt_p(self.p_values[i]),
                stars(self.p_values[i]).to_string(),
            ]);
        }
        let mut out = format!("{title}\n{}", t.render());
        out.push_str("---\nSignif. codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n");
        out.push_str(&format!("R²: {:.4}   Adjusted R²: {:.4}\n", self.r_squared, self.adj_r_squared));
        out.push_str(&format!(
            "Residual Std. Error: {} (df = {})\n",
            fmt_num(self.sigma2.sqrt()),
            self.df_resid
        ));
        if let Some(f) = &self.f_stat {
            out.push_str(&format!(
                "F-statistic: {:.2} on {} and {} DF, p-value: {}\n",
                f.value,
                f.df1,
                f.df2,
                fmt_p(f.p_value)
            ));
        }
        out.push_str(&format!("Sample Size: {}\n", self.nobs));
        out
    }
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: usize) -> f64 {
    if t.is_nan() || df == 0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    (2.0 * dist.cdf(-t.abs())).clamp(0.0, 1.0)
}

fn f_upper_tail(f: f64, df1: usize, df2: usize) -> f64 {
    if f.is_nan() {
        return f64::NAN;
    }
    if f.is_infinite() {
        return 0.0;
    }
    let dist = FisherSnedecor::new(df1 as f64, df2 as f64).expect("positive degrees of freedom");
    dist.sf(f).clamp(0.0, 1.0)
}

fn is_constant_column(x: &DMatrix<f64>, j: usize) -> bool {
    let c = x.column(j);
    c[0] != 0.0 && c.iter().all(|&v| v == c[0])
}

/// Least-squares fit of `y` on the columns of `x`, solved by Householder QR on
/// unit-norm-scaled columns.
pub fn ols(y: &[f64], x: &DesignMatrix) -> Result<RegressionResult> {
    let (n, k) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::InvalidInput(format!("response has {} rows, design has {n}", y.len())));
    }
    if k == 0 {
        return Err(Error::InvalidInput("design has no columns".into()));
    }
    if n <= k {
        return Err(Error::InsufficientSample(format!("{n} observations for {k} regressors")));
    }
    if y.iter().chain(x.data().iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in regression data".into()));
    }

    let data = x.data();
    let norms: Vec<f64> = data.column_iter().map(|c| c.norm()).collect();
    if let Some(j) = norms.iter().position(|&s| s == 0.0) {
        return Err(Error::SingularDesign {
            columns: vec![x.names()[j].clone()],
        });
    }
    let mut scaled = data.clone();
    for (j, s) in norms.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }

    let svd = scaled.clone().svd(false, true);
    let sv = &svd.singular_values;
    if sv.min() / sv.max() < RCOND_THRESHOLD {
        let v_t = svd.v_t.expect("requested right singular vectors");
        let weakest = sv.imin();
        let direction = v_t.row(weakest);
        let peak = direction.amax();
        let columns = (0..k)
            .filter(|&j| direction[j].abs() >= 0.1 * peak)
            .map(|j| x.names()[j].clone())
            .collect();
        return Err(Error::SingularDesign { columns });
    }

    let yv = DVector::from_column_slice(y);
    let qr = scaled.qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &yv;
    let beta_scaled = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign {
            columns: x.names().to_vec(),
        })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign {
            columns: x.names().to_vec(),
        })?;

    let coefficients: Vec<f64> = beta_scaled.iter().zip(&norms).map(|(b, s)| b / s).collect();
    let fitted = data * DVector::from_column_slice(&coefficients);
    let residuals: Vec<f64> = (&yv - fitted).iter().copied().collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df_resid = n - k;
    let sigma2 = rss / df_resid as f64;

    let mut standard_errors = Vec::with_capacity(k);
    for j in 0..k {
        let v: f64 = r_inv.row(j).iter().map(|a| a * a).sum();
        standard_errors.push((sigma2 * v).sqrt() / norms[j]);
    }
    let t_stats: Vec<f64> = coefficients.iter().zip(&standard_errors).map(|(b, s)| b / s).collect();
    let p_values = t_stats.iter().map(|&t| student_t_two_sided_p(t, df_resid)).collect();

    let has_intercept = (0..k).any(|j| is_constant_column(data, j));
    let tss = if has_intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };
    let df_model = k - usize::from(has_intercept);
    let df_total = n - usize::from(has_intercept);
    let adj_r_squared = 1.0 - (1.0 - r_squared) * df_total as f64 / df_resid as f64;

    let f_stat = (df_model > 0).then(|| {
        let value = ((tss - rss).max(0.0) / df_model as f64) / sigma2;
        FStat {
            value,
            df1: df_model,
            df2: df_resid,
            p_value: f_upper_tail(value, df_model, df_resid),
        }
    });

    Ok(RegressionResult {
        regressor_names: x.names().to_vec(),
        coefficients,
        standard_errors,
        t_stats,
        p_values,
        residuals,
        nobs: n,
        df_resid,
        rss,
        sigma2,
        r_squared,
        adj_r_squared,
        has_intercept,
        f_stat,
    })
}
