//! Univariate scans, multivariate model families and elastic-net variable
//! selection, with their report tables.

use std::io::Write;

use serde::Serialize;

use super::cv::{cv_random_search, CvConfig};
use super::elastic_net::ElasticNetFit;
use super::encode::{encode_features, Encoded};
use super::features::{FeatureRow, Formula, Predictor};
use super::ols::{ols_fit, stars, OlsFit};
use super::RegressionError;

pub const UNIVARIATE_HEADER: [&str; 10] = [
    "predictor",
    "level",
    "intercept",
    "slope",
    "r_squared",
    "r_squared_kind",
    "stars",
    "p_value",
    "n",
    "note",
];

pub const MULTIVARIATE_HEADER: [&str; 9] = [
    "family",
    "model",
    "formula",
    "n",
    "adj_r_squared",
    "stars",
    "se",
    "f_p_value",
    "note",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RSquaredKind {
    Plain,
    Adjusted,
}

impl RSquaredKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RSquaredKind::Plain => "r2",
            RSquaredKind::Adjusted => "adj_r2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnivariateResult {
    pub predictor: Predictor,
    pub n: usize,
    pub n_excluded: usize,
    pub warnings: Vec<String>,
    pub reference_level: Option<String>,
    pub r_squared_kind: RSquaredKind,
    pub fit: Option<OlsFit>,
    pub error: Option<String>,
}

impl UnivariateResult {
    /// Plain R² for numeric and two-level predictors, adjusted R² when a
    /// factor contributes more than one column.
    pub fn reported_r_squared(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| match self.r_squared_kind {
            RSquaredKind::Plain => f.r_squared,
            RSquaredKind::Adjusted => f.adj_r_squared,
        })
    }

    /// p-value of the overall fit (equal to the slope's for one column).
    pub fn p_value(&self) -> Option<f64> {
        self.fit.as_ref().and_then(|f| f.f_p_value)
    }
}

fn count_excluded(rows: &[FeatureRow], formula: &Formula) -> usize {
    rows.iter()
        .filter(|r| formula.predictors.iter().any(|p| p.value(r).is_none()))
        .count()
}

fn fit_encoded(rows: &[FeatureRow], formula: &Formula) -> (Option<Encoded>, Result<OlsFit, RegressionError>) {
    match encode_features(rows, formula) {
        Ok(enc) => {
            let fit = ols_fit(&enc.design, &enc.response);
            (Some(enc), fit)
        }
        Err(e) => (None, Err(e)),
    }
}

/// One `delta ~ predictor` fit per predictor; failures are kept inline.
pub fn univariate_scan(rows: &[FeatureRow], predictors: &[Predictor]) -> Result<Vec<UnivariateResult>, RegressionError> {
    if predictors.is_empty() {
        return Err(RegressionError::InvalidFormula("no predictors to scan".into()));
    }
    Ok(predictors
        .iter()
        .map(|&p| {
            let (enc, fit) = fit_encoded(rows, &Formula::new([p]));
            let slopes = enc.as_ref().map_or(0, |e| e.design.ncols() - 1);
            let kind = if p.is_factor() && slopes > 1 {
                RSquaredKind::Adjusted
            } else {
                RSquaredKind::Plain
            };
            let mut fit = fit;
            if slopes == 0 && fit.is_ok() {
                fit = Err(RegressionError::InvalidFormula(format!("{} produced no usable column", p.name())));
            }
            UnivariateResult {
                predictor: p,
                n: enc.as_ref().map_or(0, |e| e.design.nrows()),
                n_excluded: count_excluded(rows, &Formula::new([p])),
                warnings: enc.as_ref().map_or_else(Vec::new, |e| e.warnings.clone()),
                reference_level: enc.as_ref().and_then(|e| e.design.reference_levels.get(p.name()).cloned()),
                r_squared_kind: kind,
                error: fit.as_ref().err().map(|e| e.to_string()),
                fit: fit.ok(),
            }
        })
        .collect())
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_p(v: f64) -> String {
    format!("{v:.3e}")
}

/// Writes the univariate table: one summary line per predictor, then for
/// factors the reference level (with the intercept) and every other level
/// (with its slope).
pub fn write_univariate_csv<W: Write>(w: W, results: &[UnivariateResult]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(UNIVARIATE_HEADER)?;
    for r in results {
        let name = r.predictor.name();
        let Some(fit) = &r.fit else {
            let note = r.error.clone().unwrap_or_default();
            wr.write_record([name, "", "", "", "", "", "", "", &r.n.to_string(), &note])?;
            continue;
        };
        let r2 = r.reported_r_squared().unwrap_or(f64::NAN);
        let p = r.p_value();
        let star = p.map_or("", stars);
        let p_s = p.map(fmt_p).unwrap_or_default();
        let note = r.warnings.join("; ");
        let n = r.n.to_string();
        if !r.predictor.is_factor() {
            let slope = &fit.coefficients[1];
            wr.write_record([
                name,
                "",
                &fmt(fit.intercept()),
                &fmt(slope.estimate),
                &fmt(r2),
                r.r_squared_kind.as_str(),
                star,
                &p_s,
                &n,
                &note,
            ])?;
            continue;
        }
        wr.write_record([name, "", "", "", &fmt(r2), r.r_squared_kind.as_str(), star, &p_s, &n, &note])?;
        let reference = r.reference_level.clone().unwrap_or_default();
        wr.write_record([name, &reference, &fmt(fit.intercept()), "", "", "", "", "", "", "reference"])?;
        let prefix = format!("{name}=");
        for c in &fit.coefficients[1..] {
            let level = c.name.strip_prefix(&prefix).unwrap_or(&c.name);
            wr.write_record([
                name,
                level,
                "",
                &fmt(c.estimate),
                "",
                "",
                stars(c.p_value),
                &fmt_p(c.p_value),
                "",
                "",
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub family: String,
    pub label: String,
    pub formula: Formula,
}

impl ModelSpec {
    pub fn new(family: &str, label: &str, formula: Formula) -> Self {
        ModelSpec {
            family: family.to_string(),
            label: label.to_string(),
            formula,
        }
    }
}

/// The standard families: personal information, compound information
/// (with and without compound valence), domain-specific information and
/// all predictors minus name valence, compound valence, or both.
///
/// Name and compound valence together determine delta exactly, so no
/// model includes both.
pub fn standard_model_specs() -> Vec<ModelSpec> {
    use Predictor::*;
    vec![
        ModelSpec::new("(i) personal information", "age, gender", Formula::new([Age, Gender])),
        ModelSpec::new(
            "(i) personal information",
            "age, gender, nationality, birthplace",
            Formula::new([Age, Gender, Nationality, Birthplace]),
        ),
        ModelSpec::new("(ii) compound information", "modifier, frame", Formula::new([ModifierValence, Frame])),
        ModelSpec::new(
            "(ii) compound information",
            "modifier, frame, compound",
            Formula::new([ModifierValence, Frame, PncValence]),
        ),
        ModelSpec::new("(iii) domain-specific information", "domain, party", Formula::new([Domain, Party])),
        ModelSpec::new("(iv) exclude name valence", "all remaining predictors", Formula::all_except(&[NameValence])),
        ModelSpec::new("(v) exclude compound valence", "all remaining predictors", Formula::all_except(&[PncValence])),
        ModelSpec::new(
            "(vi) exclude both",
            "all remaining predictors",
            Formula::all_except(&[NameValence, PncValence]),
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultivariateResult {
    pub spec: ModelSpec,
    pub n: usize,
    pub n_excluded: usize,
    pub warnings: Vec<String>,
    pub fit: Option<OlsFit>,
    pub error: Option<String>,
}

pub fn multivariate_suite(rows: &[FeatureRow], specs: &[ModelSpec]) -> Vec<MultivariateResult> {
    specs
        .iter()
        .map(|spec| {
            let (enc, fit) = fit_encoded(rows, &spec.formula);
            MultivariateResult {
                spec: spec.clone(),
                n: enc.as_ref().map_or(0, |e| e.design.nrows()),
                n_excluded: count_excluded(rows, &spec.formula),
                warnings: enc.as_ref().map_or_else(Vec::new, |e| e.warnings.clone()),
                error: fit.as_ref().err().map(|e| e.to_string()),
                fit: fit.ok(),
            }
        })
        .collect()
}

pub fn write_multivariate_csv<W: Write>(w: W, results: &[MultivariateResult]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(MULTIVARIATE_HEADER)?;
    for r in results {
        let formula = r.spec.formula.to_string();
        let n = r.n.to_string();
        match &r.fit {
            Some(fit) => {
                let p = fit.f_p_value;
                let mut note = r.warnings.join("; ");
                if r.n_excluded > 0 {
                    if !note.is_empty() {
                        note.push_str("; ");
                    }
                    note.push_str(&format!("{} rows excluded", r.n_excluded));
                }
                wr.write_record([
                    r.spec.family.as_str(),
                    &r.spec.label,
                    &formula,
                    &n,
                    &fmt(fit.adj_r_squared),
                    p.map_or("", stars),
                    &fmt(fit.residual_se),
                    &p.map(fmt_p).unwrap_or_default(),
                    &note,
                ])?;
            }
            None => {
                let note = r.error.clone().unwrap_or_default();
                wr.write_record([r.spec.family.as_str(), &r.spec.label, &formula, &n, "", "", "", "", &note])?;
            }
        }
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElasticNetResult {
    pub label: String,
    pub formula: Formula,
    pub n: usize,
    pub n_excluded: usize,
    pub fit: Option<ElasticNetFit>,
    pub error: Option<String>,
}

/// Cross-validated elastic nets on all predictors minus name valence,
/// compound valence, or both, each on its own standardized design.
pub fn elastic_net_selection(rows: &[FeatureRow], cfg: &CvConfig) -> Vec<ElasticNetResult> {
    use Predictor::*;
    let variants = [
        ("exclude name valence", Formula::all_except(&[NameValence])),
        ("exclude compound valence", Formula::all_except(&[PncValence])),
        ("exclude both", Formula::all_except(&[NameValence, PncValence])),
    ];
    variants
        .into_iter()
        .map(|(label, formula)| {
            let enc = encode_features(rows, &formula);
            let n = enc.as_ref().map_or(0, |e| e.design.nrows());
            let n_excluded = count_excluded(rows, &formula);
            let fit = enc.and_then(|e| {
                let x = e.design.standardized()?;
                cv_random_search(&x, &e.response, cfg)
            });
            ElasticNetResult {
                label: label.to_string(),
                formula,
                n,
                n_excluded,
                error: fit.as_ref().err().map(|e| e.to_string()),
                fit: fit.ok(),
            }
        })
        .collect()
}

/// Everything the regression stage reports, serialized as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub n_rows: usize,
    pub univariate: Vec<UnivariateResult>,
    pub multivariate: Vec<MultivariateResult>,
    pub elastic_net: Vec<ElasticNetResult>,
}

pub fn regression_report(rows: &[FeatureRow], cfg: &CvConfig) -> RegressionReport {
    RegressionReport {
        n_rows: rows.len(),
        univariate: univariate_scan(rows, &Predictor::ALL).expect("predictor list is non-empty"),
        multivariate: multivariate_suite(rows, &standard_model_specs()),
        elastic_net: elastic_net_selection(rows, cfg),
    }
}

/// The `(R², α, λ)` triple in the two-decimal form used when reporting a
/// selected elastic net.
pub fn format_elastic_net_triple(fit: &ElasticNetFit) -> String {
    format!("(R²={:.2}, α={:.2}, λ={:.2})", fit.r_squared, fit.alpha, fit.lambda)
}
