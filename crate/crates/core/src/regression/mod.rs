//! Regression models predicting the compound-name delta from target
//! metadata and valence scores.

mod cv;
mod elastic_net;
mod encode;
mod features;
mod ols;
mod suite;

pub use cv::{cv_random_search, CvConfig, CvMetric};
pub use elastic_net::{
    elastic_net_fit, elastic_net_fit_with, lambda_max, soft_threshold, CvCandidate, ElasticNetFit, ElasticNetOptions,
};
pub use encode::{encode_features, standardize, DesignMatrix, Encoded, Exclusion, INTERCEPT};
pub use features::{
    build_feature_rows, parse_metadata_csv, read_metadata_csv, Birthplace, FeatureRow, Formula, Gender, Metadata,
    Predictor, PredictorValue,
};
pub use ols::{ols_fit, stars, Coefficient, OlsFit};
pub use suite::{
    elastic_net_selection, format_elastic_net_triple, multivariate_suite, regression_report, standard_model_specs,
    univariate_scan, write_multivariate_csv, write_univariate_csv, ElasticNetResult, ModelSpec, MultivariateResult,
    RSquaredKind, RegressionReport, UnivariateResult, MULTIVARIATE_HEADER, UNIVARIATE_HEADER,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegressionError {
    #[error("unknown predictor {0:?}")]
    UnknownPredictor(String),
    #[error("invalid formula {0:?}")]
    InvalidFormula(String),
    #[error("{origin}:{line}: {message}")]
    Metadata { origin: String, line: usize, message: String },
    #[error("non-finite delta for {0}")]
    NonFiniteResponse(String),
    #[error("no rows left after excluding missing values")]
    EmptyMatrix,
    #[error("only {n} row(s) left after excluding missing values; need at least 2")]
    TooFewRows { n: usize },
    #[error("{n} rows cannot identify {p} coefficients")]
    NotEnoughRows { n: usize, p: usize },
    #[error("design has {rows} rows but the response has {response} values")]
    LengthMismatch { rows: usize, response: usize },
    #[error("column {column} is collinear with [{}]", collinear_with.join(", "))]
    RankDeficient { column: String, collinear_with: Vec<String> },
    #[error("design matrix has no intercept column")]
    MissingIntercept,
    #[error("standardized design must not contain an intercept column")]
    UnexpectedIntercept,
    #[error("response is constant")]
    ConstantResponse,
    #[error("column {0} has zero variance")]
    ZeroVariance(String),
    #[error("alpha {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("lambda {0} is not a non-negative finite number")]
    InvalidLambda(f64),
    #[error("coordinate descent did not converge after {sweeps} sweeps (last max change {max_change:e}, objective tail {objective_tail:?})")]
    NonConvergence {
        sweeps: usize,
        max_change: f64,
        objective_tail: Vec<f64>,
    },
    #[error("objective rose in sweep {sweep}: {before} -> {after}")]
    ObjectiveIncreased { sweep: usize, before: f64, after: f64 },
    #[error("{n} rows are not enough for {folds}-fold cross-validation")]
    TooFewRowsForFolds { n: usize, folds: usize },
    #[error("every candidate failed during cross-validation")]
    NoViableCandidate,
}
