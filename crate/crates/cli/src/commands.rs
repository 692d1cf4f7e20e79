//! One function per subcommand. Each writes its file artifacts and returns
//! the human-readable text for the run.

use std::fs;
use std::path::PathBuf;

use ecmkit::report::TextTable;
use ecmkit::unitroot::classify_integration_with;
use ecmkit::{
    adf_test_with, difference, engle_granger, estimate_vecm, fevd_ordered, forecast, irf, johansen_trace, load_panel,
    select_lag, summarize, vecm_to_var, AdfResult, IntegrationOrder, IrfResult, JohansenResult, LagSelection, Panel,
    QuarterIndex, VecmModel,
};
use serde::Serialize;

use crate::config::{Auto, RunConfig};
use crate::svg::{LinePlot, Series};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub struct Context {
    pub config: RunConfig,
    pub panel: Panel,
    written: Vec<PathBuf>,
}

fn year_fraction(q: QuarterIndex) -> f64 {
    q.year() as f64 + (q.quarter() as f64 - 1.0) / 4.0
}

impl Context {
    /// Loads the configured panel. Configuration problems that only show up
    /// once the sample length is known are still reported as such.
    pub fn load(config: RunConfig) -> Result<Self> {
        let panel = load_panel(&config.data_dir, &config.series)?.select(&config.variables)?;
        let from = config.start.unwrap_or(panel.first());
        let to = config.end.unwrap_or(panel.last());
        let panel = panel.span(from, to)?;
        if config.holdout + 20 >= panel.len() && config.holdout > 0 {
            return Err(CliError::Config(vec![format!(
                "holdout: {} quarters leaves fewer than 20 of the {} in the sample",
                config.holdout,
                panel.len()
            )]));
        }
        Ok(Context {
            config,
            panel,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let dir = &self.config.out;
        fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.clone(),
            source,
        })?;
        let p = dir.join(name);
        self.written.push(p.clone());
        Ok(p)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.path(name)?;
        fs::write(&p, bytes).map_err(|source| CliError::Output { path: p, source })
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        if self.config.formats.text {
            self.write(&format!("{name}.txt"), body.as_bytes())?;
        }
        Ok(())
    }

    fn csv(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> ecmkit::Result<()>) -> Result<()> {
        if self.config.formats.csv {
            let mut buf = Vec::new();
            fill(&mut buf)?;
            self.write(&format!("{name}.csv"), &buf)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.config.formats.json {
            let mut s = serde_json::to_string_pretty(value).map_err(ecmkit::Error::from)?;
            s.push('\n');
            self.write(&format!("{name}.json"), s.as_bytes())?;
        }
        Ok(())
    }

    fn svg(&mut self, name: &str, plot: &LinePlot) -> Result<()> {
        if self.config.formats.svg {
            self.write(&format!("{name}.svg"), plot.render().as_bytes())?;
        }
        Ok(())
    }

    fn choose_lags(&self, panel: &Panel) -> Result<(usize, Option<LagSelection>)> {
        Ok(match self.config.lags {
            Auto::Fixed(k) => (k, None),
            Auto::Auto => {
                let sel = select_lag(panel, self.config.max_lags, self.config.seasonality)?;
                (sel.selected, Some(sel))
            }
        })
    }

    /// Lags by MSBIC and rank by the trace test unless fixed in the config.
    fn fit(&self, panel: &Panel) -> Result<VecmModel> {
        let (k, _) = self.choose_lags(panel)?;
        let rank = match self.config.rank {
            Auto::Fixed(r) => r,
            Auto::Auto => johansen_trace(panel, k, self.config.seasonality, self.config.cv_table)?.selected_rank,
        };
        Ok(estimate_vecm(panel, rank, k, self.config.seasonality)?)
    }
}

fn write_rows<W: std::io::Write>(w: W, header: &[String], rows: &[Vec<String>]) -> ecmkit::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary(ctx: &mut Context) -> Result<String> {
    let table = summarize(&ctx.panel)?;
    ctx.csv("summary", |w| table.write_csv(w))?;
    ctx.json("summary", &table)?;
    let panel = ctx.panel.clone();
    for (j, name) in panel.names().iter().enumerate() {
        let points = panel
            .index()
            .iter()
            .zip(panel.column(j))
            .map(|(q, v)| (year_fraction(*q), *v))
            .collect();
        ctx.svg(
            &format!("levels_{name}"),
            &LinePlot {
                title: name.clone(),
                x_label: "year".into(),
                y_label: name.clone(),
                series: vec![Series::new(name.clone(), points)],
                zero_line: false,
            },
        )?;
    }
    Ok(format!("Summary statistics, {} to {}\n{}", panel.first(), panel.last(), table.render()))
}

#[derive(Serialize)]
struct UnitRootRow {
    variable: String,
    level: AdfResult,
    difference: AdfResult,
    integration_order: IntegrationOrder,
}

pub fn unitroot(ctx: &mut Context) -> Result<String> {
    let adf = ctx.config.adf;
    let mut rows = Vec::new();
    for (j, name) in ctx.panel.names().iter().enumerate() {
        let x = ctx.panel.column(j);
        rows.push(UnitRootRow {
            variable: name.clone(),
            level: adf_test_with(x, &adf)?,
            difference: adf_test_with(&difference(x, 1)?, &adf)?,
            integration_order: classify_integration_with(x, 2, &adf)?,
        });
    }
    let header: Vec<String> = ["series", "statistic", "lags", "nobs", "critical_value", "decision", "order"]
        .map(String::from)
        .to_vec();
    let mut table = TextTable::new(header.clone());
    let mut csv_rows = Vec::new();
    for r in &rows {
        for (form, res) in [(r.variable.clone(), &r.level), (format!("d.{}", r.variable), &r.difference)] {
            let cells = vec![
                form,
                if res.statistic.is_finite() { format!("{:.4}", res.statistic) } else { res.statistic.to_string() },
                res.lags_used.to_string(),
                res.nobs.to_string(),
                format!("{:.4}", res.level.pick(&res.critical_values)),
                if res.rejects() { "reject unit root" } else { "fail to reject" }.to_string(),
                r.integration_order.to_string(),
            ];
            csv_rows.push(cells.clone());
            table.row(cells);
        }
    }
    ctx.csv("unitroot", |w| write_rows(w, &header, &csv_rows))?;
    ctx.json("unitroot", &rows)?;
    Ok(format!(
        "Augmented Dickey-Fuller tests ({:?}, {} lags {:?}, level {})\n{}",
        adf.deterministic,
        adf.max_lags,
        adf.lag_rule,
        adf.level,
        table.render()
    ))
}

pub fn eg(ctx: &mut Context) -> Result<String> {
    let dep = ctx.config.eg_dependent.clone();
    let res = engle_granger(&ctx.panel, &dep, &ctx.config.adf)?;
    let s = &res.step1;
    let header: Vec<String> = ["regressor", "estimate", "std_error", "t_statistic", "p_value"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = (0..s.regressor_names.len())
        .map(|i| {
            vec![
                s.regressor_names[i].clone(),
                s.coefficients[i].to_string(),
                s.standard_errors[i].to_string(),
                s.t_stats[i].to_string(),
                s.p_values[i].to_string(),
            ]
        })
        .collect();
    ctx.csv("eg_step1", |w| write_rows(w, &header, &rows))?;
    ctx.json("eg", &res)?;
    let t = &res.residual_test;
    let cv = t.level.pick(&t.critical_values);
    Ok(format!(
        "{}\nEngle-Granger residual test\n  statistic {:.4}   {} critical value {:.4}   lags {}   nobs {}\n  {}\n",
        s.render(&format!("{dep} as the dependent variable")),
        t.statistic,
        t.level,
        cv,
        t.lags_used,
        t.nobs,
        if res.cointegrated {
            "Residuals are stationary: evidence of cointegration"
        } else {
            "Unit root in residuals not rejected: no evidence of cointegration"
        }
    ))
}

#[derive(Serialize)]
struct JohansenOutput<'a> {
    lag_selection: &'a Option<LagSelection>,
    result: &'a JohansenResult,
}

pub fn johansen(ctx: &mut Context) -> Result<String> {
    let (k, lag_selection) = ctx.choose_lags(&ctx.panel)?;
    let res = johansen_trace(&ctx.panel, k, ctx.config.seasonality, ctx.config.cv_table)?;
    let header: Vec<String> = ["null_rank_at_most", "eigenvalue", "trace_statistic", "critical_value_5pct", "reject"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = (0..res.trace_stats.len())
        .map(|r| {
            vec![
                r.to_string(),
                res.eigenvalues[r].to_string(),
                res.trace_stats[r].to_string(),
                res.critical_values_5pct[r].to_string(),
                (res.trace_stats[r] > res.critical_values_5pct[r]).to_string(),
            ]
        })
        .collect();
    ctx.csv("johansen", |w| write_rows(w, &header, &rows))?;
    ctx.json(
        "johansen",
        &JohansenOutput {
            lag_selection: &lag_selection,
            result: &res,
        },
    )?;
    let mut text = String::new();
    if let Some(sel) = &lag_selection {
        text.push_str("Lag selection by MSBIC\n");
        text.push_str(&sel.render());
        text.push('\n');
    }
    text.push_str("Johansen trace test\n");
    text.push_str(&res.render());
    Ok(text)
}

pub fn fit(ctx: &mut Context) -> Result<String> {
    let panel = ctx.panel.clone();
    let m = &ctx.fit(&panel)?;
    let header: Vec<String> = ["equation", "regressor", "estimate", "std_error", "t_statistic", "p_value"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for (name, eq) in m.variable_names.iter().zip(&m.equations) {
        for i in 0..eq.regressor_names.len() {
            rows.push(vec![
                format!("d.{name}"),
                eq.regressor_names[i].clone(),
                eq.coefficients[i].to_string(),
                eq.standard_errors[i].to_string(),
                eq.t_stats[i].to_string(),
                eq.p_values[i].to_string(),
            ]);
        }
    }
    ctx.csv("vecm_coefficients", |w| write_rows(w, &header, &rows))?;
    if ctx.config.formats.json {
        let text = m.to_json()? + "\n";
        ctx.write("vecm_model.json", text.as_bytes())?;
    }
    ctx.json("level_var", &vecm_to_var(m))?;
    Ok(format!(
        "VECM with k = {}, rank = {} ({} to {}, T_eff = {})\n\n{}",
        m.k,
        m.rank,
        m.first_quarter,
        m.last_quarter,
        m.t_eff,
        m.render()
    ))
}

pub fn forecast_cmd(ctx: &mut Context) -> Result<String> {
    let holdout = ctx.config.holdout;
    let full = ctx.panel.clone();
    let (train, h) = if holdout > 0 {
        (full.slice(0..full.len() - holdout)?, holdout)
    } else {
        (full.clone(), ctx.config.horizon)
    };
    let model = ctx.fit(&train)?;
    let var = vecm_to_var(&model);
    let mut result = forecast(&var, &train, h)?;
    if holdout > 0 {
        result = result.evaluate(&full)?;
    }
    ctx.csv("forecast", |w| result.write_csv(w))?;
    ctx.json("forecast", &result)?;

    let tail = train.len().saturating_sub(24);
    for (j, name) in full.names().iter().enumerate() {
        let end = if holdout > 0 { full.len() } else { train.len() };
        let actual = (tail..end).map(|t| (year_fraction(full.index()[t]), full.column(j)[t])).collect();
        let last = train.len() - 1;
        let predicted = std::iter::once((year_fraction(train.index()[last]), train.column(j)[last]))
            .chain(
                result
                    .quarters
                    .iter()
                    .enumerate()
                    .map(|(s, q)| (year_fraction(*q), result.point_forecasts[(s, j)])),
            )
            .collect();
        ctx.svg(
            &format!("forecast_{name}"),
            &LinePlot {
                title: format!("{name}: actual and forecast"),
                x_label: "year".into(),
                y_label: name.clone(),
                series: vec![Series::new("actual", actual), Series::new("forecast", predicted).dashed()],
                zero_line: false,
            },
        )?;
    }
    let origin = train.last();
    Ok(format!(
        "{h}-step forecast from {origin} (k = {}, rank = {})\n{}",
        model.k,
        model.rank,
        result.render()
    ))
}

pub fn irf_cmd(ctx: &mut Context) -> Result<String> {
    let panel = ctx.panel.clone();
    let var = vecm_to_var(&ctx.fit(&panel)?);
    let ordering = ctx.config.ordering.clone();
    let horizon = ctx.config.horizon;
    let mut results: Vec<IrfResult> = Vec::new();
    let mut text = format!("Orthogonal impulse responses, ordering {}\n", ordering.join(", "));
    for impulse in var.variable_names.clone() {
        let r = irf(&var, &impulse, horizon, &ordering)?;
        ctx.csv(&format!("irf_{impulse}"), |w| r.write_csv(w, false))?;
        ctx.csv(&format!("irf_{impulse}_levels"), |w| r.write_csv(w, true))?;
        let series = r
            .variable_names
            .iter()
            .enumerate()
            .map(|(j, v)| {
                Series::new(
                    format!("d.{v}"),
                    (0..=horizon).map(|s| (s as f64, r.responses[(s, j)])).collect(),
                )
            })
            .collect();
        ctx.svg(
            &format!("irf_{impulse}"),
            &LinePlot {
                title: format!("Orthogonal impulse response from d.{impulse}"),
                x_label: "horizon (quarters)".into(),
                y_label: "response".into(),
                series,
                zero_line: true,
            },
        )?;
        let mut header = vec!["Horizon".to_string()];
        header.extend(r.variable_names.iter().map(|v| format!("d.{v}")));
        let mut t = TextTable::new(header);
        for s in 0..=horizon {
            let mut row = vec![s.to_string()];
            row.extend(r.responses.row(s).iter().map(|v| format!("{v:.4}")));
            t.row(row);
        }
        text.push_str(&format!("\nShock to d.{impulse}\n{}", t.render()));
        results.push(r);
    }
    ctx.json("irf", &results)?;
    Ok(text)
}

pub fn fevd_cmd(ctx: &mut Context) -> Result<String> {
    let panel = ctx.panel.clone();
    let var = vecm_to_var(&ctx.fit(&panel)?);
    let m = fevd_ordered(&var, ctx.config.horizon, &ctx.config.ordering)?;
    ctx.csv("fevd", |w| m.write_csv(w))?;
    ctx.json("fevd", &m)?;
    Ok(format!("Forecast-error variance decomposition, ordering {}\n\n{}", m.ordering.join(", "), m.render()))
}

/// Every analysis in sequence; the combined text also goes to `report.txt`.
pub fn report(ctx: &mut Context) -> Result<String> {
    type Step = fn(&mut Context) -> Result<String>;
    let steps: [(&str, Step); 8] = [
        ("summary", summary),
        ("unitroot", unitroot),
        ("eg", eg),
        ("johansen", johansen),
        ("fit", fit),
        ("forecast", forecast_cmd),
        ("irf", irf_cmd),
        ("fevd", fevd_cmd),
    ];
    let mut all = String::new();
    for (name, step) in steps {
        let body = step(ctx)?;
        ctx.text(name, &body)?;
        all.push_str(&format!("==== {name} ====\n{body}\n"));
    }
    ctx.json("run", &ctx.config.clone())?;
    Ok(all)
}

