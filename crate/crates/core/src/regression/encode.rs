//! Design-matrix construction: listwise deletion, one-hot factors and
//! optional standardization.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::Serialize;

use super::features::{FeatureRow, Formula, PredictorValue};
use super::RegressionError;

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub columns: Vec<String>,
    pub data: DMatrix<f64>,
    /// Factor name to its dropped (reference) level.
    pub reference_levels: BTreeMap<String, String>,
    /// Per-column (mean, population sd) when the matrix was standardized.
    pub standardization: Option<Vec<(f64, f64)>>,
}

impl DesignMatrix {
    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn has_intercept(&self) -> bool {
        self.columns.first().map(String::as_str) == Some(INTERCEPT)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Drops the intercept and centers and scales every remaining column
    /// to mean 0 and population sd 1.
    pub fn standardized(&self) -> Result<DesignMatrix, RegressionError> {
        let (start, columns) = if self.has_intercept() {
            (1, self.columns[1..].to_vec())
        } else {
            (0, self.columns.clone())
        };
        let slopes = self.data.columns(start, self.ncols() - start).into_owned();
        let (data, params) = standardize(&slopes, &columns)?;
        Ok(DesignMatrix {
            columns,
            data,
            reference_levels: self.reference_levels.clone(),
            standardization: Some(params),
        })
    }

    /// Prepends an intercept column if there is none.
    pub fn with_intercept(&self) -> DesignMatrix {
        if self.has_intercept() {
            return self.clone();
        }
        let n = self.nrows();
        let data = self.data.clone().insert_column(0, 1.0);
        let mut columns = vec![INTERCEPT.to_string()];
        columns.extend(self.columns.iter().cloned());
        debug_assert_eq!(data.nrows(), n);
        DesignMatrix {
            columns,
            data,
            reference_levels: self.reference_levels.clone(),
            standardization: self.standardization.clone(),
        }
    }

    /// Rows selected by index, keeping column metadata.
    pub fn select_rows(&self, rows: &[usize]) -> DesignMatrix {
        DesignMatrix {
            columns: self.columns.clone(),
            data: self.data.select_rows(rows.iter()),
            reference_levels: self.reference_levels.clone(),
            standardization: self.standardization.clone(),
        }
    }
}

/// Centers every column and divides by its population sd.
pub fn standardize(x: &DMatrix<f64>, names: &[String]) -> Result<(DMatrix<f64>, Vec<(f64, f64)>), RegressionError> {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    let mut params = Vec::with_capacity(x.ncols());
    for j in 0..x.ncols() {
        let col = x.column(j);
        let mean = col.sum() / n;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        if !(sd > 1e-12) {
            return Err(RegressionError::ZeroVariance(names[j].clone()));
        }
        for v in out.column_mut(j).iter_mut() {
            *v = (*v - mean) / sd;
        }
        params.push((mean, sd));
    }
    Ok((out, params))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub target_id: String,
    pub missing: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub design: DesignMatrix,
    pub response: Vec<f64>,
    pub target_ids: Vec<String>,
    pub excluded: Vec<Exclusion>,
    pub warnings: Vec<String>,
}

/// Encodes the formula's predictors for the rows that have all of them,
/// with an intercept column first.
pub fn encode_features(rows: &[FeatureRow], formula: &Formula) -> Result<Encoded, RegressionError> {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for row in rows {
        if !row.delta.is_finite() {
            return Err(RegressionError::NonFiniteResponse(row.target_id.clone()));
        }
        let missing: Vec<&'static str> = formula
            .predictors
            .iter()
            .filter(|p| p.value(row).is_none())
            .map(|p| p.name())
            .collect();
        if missing.is_empty() {
            kept.push(row);
        } else {
            log::info!("excluding {} from fit: missing {}", row.target_id, missing.join(", "));
            excluded.push(Exclusion {
                target_id: row.target_id.clone(),
                missing,
            });
        }
    }
    if kept.is_empty() {
        return Err(RegressionError::EmptyMatrix);
    }
    if kept.len() < 2 {
        return Err(RegressionError::TooFewRows { n: kept.len() });
    }

    let n = kept.len();
    let mut columns = vec![INTERCEPT.to_string()];
    let mut values: Vec<Vec<f64>> = vec![vec![1.0; n]];
    let mut reference_levels = BTreeMap::new();
    let mut warnings = Vec::new();

    for p in &formula.predictors {
        let cells: Vec<PredictorValue> = kept.iter().map(|r| p.value(r).expect("filtered above")).collect();
        if !p.is_factor() {
            columns.push(p.name().to_string());
            values.push(
                cells
                    .iter()
                    .map(|c| match c {
                        PredictorValue::Numeric(v) => *v,
                        PredictorValue::Level(_) => unreachable!("numeric predictor"),
                    })
                    .collect(),
            );
            continue;
        }
        let level = |c: &PredictorValue| match c {
            PredictorValue::Level(s) => s.clone(),
            PredictorValue::Numeric(_) => unreachable!("factor predictor"),
        };
        let levels: BTreeSet<String> = cells.iter().map(level).collect();
        let mut it = levels.iter();
        let reference = it.next().expect("at least one row").clone();
        if levels.len() == 1 {
            let msg = format!("{} has a single observed level ({reference}); column dropped", p.name());
            log::warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        for lv in it {
            columns.push(format!("{}={lv}", p.name()));
            values.push(cells.iter().map(|c| if &level(c) == lv { 1.0 } else { 0.0 }).collect());
        }
        reference_levels.insert(p.name().to_string(), reference);
    }

    let data = DMatrix::from_fn(n, columns.len(), |i, j| values[j][i]);
    Ok(Encoded {
        design: DesignMatrix {
            columns,
            data,
            reference_levels,
            standardization: None,
        },
        response: kept.iter().map(|r| r.delta).collect(),
        target_ids: kept.iter().map(|r| r.target_id.clone()).collect(),
        excluded,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::super::features::{Gender, Predictor};
    use super::*;

    fn rows() -> Vec<FeatureRow> {
        let parties = ["SPD", "CDU", "AfD", "CDU", "SPD", "AfD"];
        (0..6)
            .map(|i| {
                let mut r = FeatureRow::new(&format!("t{i}"), i as f64 - 2.5);
                r.pnc_valence = Some(4.0 + i as f64 * 0.3);
                r.modifier_valence = (i != 3).then_some(5.0 - i as f64 * 0.1);
                r.gender = Some(if i % 2 == 0 { Gender::Female } else { Gender::Male });
                r.party = Some(parties[i].to_string());
                r.frame = Some("Killing".into());
                r
            })
            .collect()
    }

    #[test]
    fn gender_reference_is_female() {
        let e = encode_features(&rows(), &Formula::new([Predictor::Gender])).unwrap();
        assert_eq!(e.design.columns, [INTERCEPT, "gender=male"]);
        assert_eq!(e.design.reference_levels["gender"], "female");
    }

    #[test]
    fn three_party_levels_give_two_columns() {
        let e = encode_features(&rows(), &Formula::new([Predictor::Party])).unwrap();
        assert_eq!(e.design.columns, [INTERCEPT, "party=CDU", "party=SPD"]);
        assert_eq!(e.design.reference_levels["party"], "AfD");
        for i in 0..e.design.nrows() {
            let s: f64 = (1..3).map(|j| e.design.data[(i, j)]).sum();
            assert!(s <= 1.0);
        }
    }

    #[test]
    fn missing_modifier_excludes_one_row() {
        let e = encode_features(&rows(), &Formula::new([Predictor::ModifierValence, Predictor::PncValence])).unwrap();
        assert_eq!(e.design.nrows(), 5);
        assert_eq!(e.excluded.len(), 1);
        assert_eq!(e.excluded[0].target_id, "t3");
        assert_eq!(e.excluded[0].missing, ["modifier_valence"]);
        assert_eq!(e.response.len(), 5);
    }

    #[test]
    fn single_level_factor_is_dropped_with_warning() {
        let e = encode_features(&rows(), &Formula::new([Predictor::Frame, Predictor::PncValence])).unwrap();
        assert_eq!(e.design.columns, [INTERCEPT, "pnc_valence"]);
        assert_eq!(e.warnings.len(), 1);
    }

    #[test]
    fn empty_and_tiny_inputs_fail() {
        let f = Formula::new([Predictor::Age]);
        assert!(matches!(encode_features(&rows(), &f), Err(RegressionError::EmptyMatrix)));
        let mut one = rows();
        one[0].age = Some(40);
        assert!(matches!(encode_features(&one, &f), Err(RegressionError::TooFewRows { n: 1 })));
    }

    #[test]
    fn standardized_columns() {
        let e = encode_features(&rows(), &Formula::new([Predictor::PncValence, Predictor::Party])).unwrap();
        let s = e.design.standardized().unwrap();
        assert!(!s.has_intercept());
        assert_eq!(s.columns, ["pnc_valence", "party=CDU", "party=SPD"]);
        for j in 0..s.ncols() {
            let c = s.data.column(j);
            let mean = c.sum() / 6.0;
            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 6.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
        assert!(s.with_intercept().has_intercept());
    }
}
