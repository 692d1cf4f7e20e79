//! Cointegration analysis and vector error-correction modelling for
//! quarterly macroeconomic panels.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`dataio`]: quarterly calendar, CSV ingestion into aligned [`Panel`]s, summary statistics.
//! - [`series`]: differencing, lags, seasonal dummies and the VECM regressor layout.
//! - [`regress`]: ordinary least squares with full inferential output.
//! - [`unitroot`]: augmented Dickey-Fuller tests and the Engle-Granger two-step test.
//! - [`johansen`]: reduced-rank trace test, lag selection and VECM estimation.
//! - [`dynamics`]: level-VAR representation, forecasting, impulse responses and
//!   forecast-error variance decomposition.

pub mod dataio;
pub mod dynamics;
pub mod error;
pub mod johansen;
pub mod linalg;
pub mod regress;
pub mod report;
pub mod series;
pub mod tables;
pub mod unitroot;

pub use dataio::{load_panel, parse_quarter, summarize, Panel, QuarterIndex, SeriesSpec, SummaryTable};
pub use dynamics::{
    fevd, fevd_ordered, forecast, forecast_with_dummies, irf, mape, rmse, vecm_to_var, FevdMatrix, ForecastResult,
    IrfResult, LevelVarModel,
};
pub use error::{Error, ErrorKind, Result};
pub use johansen::{
    estimate_vecm, johansen_trace, msbic, select_lag, select_rank, JohansenResult, LagCriterion, LagSelection,
    VecmModel,
};
pub use regress::{ols, student_t_two_sided_p, RegressionResult};
pub use series::{
    build_vecm_design, difference, dummies_for, lag, seasonal_dummies, DesignMatrix, DummySet, Seasonality, VecmDesign,
};
pub use tables::{CriticalTable, CriticalValues, Deterministic, Level};
pub use unitroot::{
    adf_test, adf_test_with, classify_integration, engle_granger, AdfConfig, AdfResult, Decision, EgResult,
    IntegrationOrder, LagRule,
};
