//! Enriched per-target records and model formulas.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RegressionError;
use crate::corpus::Domain;
use crate::valence::{DeltaRecord, ScoreRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Birthplace {
    WestGermany,
    EastGermany,
    OutsideGermany,
}

fn level_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Target metadata joined with the valence scores and delta it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRow {
    pub target_id: String,
    pub delta: f64,
    pub name_valence: Option<f64>,
    pub pnc_valence: Option<f64>,
    pub modifier_valence: Option<f64>,
    /// Age in full years, or age at death.
    pub age: Option<u32>,
    pub gender: Option<Gender>,
    pub domain: Option<Domain>,
    pub nationality: Option<String>,
    pub birthplace: Option<Birthplace>,
    pub party: Option<String>,
    pub frame: Option<String>,
}

impl FeatureRow {
    pub fn new(target_id: &str, delta: f64) -> Self {
        FeatureRow {
            target_id: target_id.to_string(),
            delta,
            name_valence: None,
            pnc_valence: None,
            modifier_valence: None,
            age: None,
            gender: None,
            domain: None,
            nationality: None,
            birthplace: None,
            party: None,
            frame: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    NameValence,
    PncValence,
    ModifierValence,
    Age,
    Gender,
    Domain,
    Nationality,
    Birthplace,
    Party,
    Frame,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredictorValue {
    Numeric(f64),
    Level(String),
}

impl Predictor {
    pub const ALL: [Predictor; 10] = [
        Predictor::NameValence,
        Predictor::PncValence,
        Predictor::ModifierValence,
        Predictor::Age,
        Predictor::Gender,
        Predictor::Domain,
        Predictor::Nationality,
        Predictor::Birthplace,
        Predictor::Party,
        Predictor::Frame,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Predictor::NameValence => "name_valence",
            Predictor::PncValence => "pnc_valence",
            Predictor::ModifierValence => "modifier_valence",
            Predictor::Age => "age",
            Predictor::Gender => "gender",
            Predictor::Domain => "domain",
            Predictor::Nationality => "nationality",
            Predictor::Birthplace => "birthplace",
            Predictor::Party => "party",
            Predictor::Frame => "frame",
        }
    }

    pub fn is_factor(&self) -> bool {
        !matches!(
            self,
            Predictor::NameValence | Predictor::PncValence | Predictor::ModifierValence | Predictor::Age
        )
    }

    pub fn value(&self, row: &FeatureRow) -> Option<PredictorValue> {
        use PredictorValue::*;
        match self {
            Predictor::NameValence => row.name_valence.map(Numeric),
            Predictor::PncValence => row.pnc_valence.map(Numeric),
            Predictor::ModifierValence => row.modifier_valence.map(Numeric),
            Predictor::Age => row.age.map(|a| Numeric(a as f64)),
            Predictor::Gender => row.gender.as_ref().map(|g| Level(level_name(g))),
            Predictor::Domain => row.domain.map(|d| Level(d.as_str().to_string())),
            Predictor::Nationality => row.nationality.clone().map(Level),
            Predictor::Birthplace => row.birthplace.as_ref().map(|b| Level(level_name(b))),
            Predictor::Party => row.party.clone().map(Level),
            Predictor::Frame => row.frame.clone().map(Level),
        }
    }
}

impl std::str::FromStr for Predictor {
    type Err = RegressionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Predictor::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| RegressionError::UnknownPredictor(s.to_string()))
    }
}

/// `delta ~ p1 + p2 + ...`; `delta ~ 1` is the intercept-only model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Formula {
    pub predictors: Vec<Predictor>,
}

impl Formula {
    pub fn new(predictors: impl IntoIterator<Item = Predictor>) -> Self {
        let mut seen = Vec::new();
        for p in predictors {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        Formula { predictors: seen }
    }

    /// Every predictor except those listed.
    pub fn all_except(excluded: &[Predictor]) -> Self {
        Formula::new(Predictor::ALL.into_iter().filter(|p| !excluded.contains(p)))
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.predictors.is_empty() {
            return f.write_str("delta ~ 1");
        }
        let names: Vec<&str> = self.predictors.iter().map(Predictor::name).collect();
        write!(f, "delta ~ {}", names.join(" + "))
    }
}

impl std::str::FromStr for Formula {
    type Err = RegressionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lhs, rhs) = s
            .split_once('~')
            .ok_or_else(|| RegressionError::InvalidFormula(s.to_string()))?;
        if lhs.trim() != "delta" {
            return Err(RegressionError::InvalidFormula(s.to_string()));
        }
        let rhs = rhs.trim();
        if rhs == "1" {
            return Ok(Formula::new([]));
        }
        if rhs.is_empty() {
            return Err(RegressionError::InvalidFormula(s.to_string()));
        }
        let preds = rhs
            .split('+')
            .map(str::parse)
            .collect::<Result<Vec<Predictor>, _>>()?;
        Ok(Formula::new(preds))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub age: Option<u32>,
    pub gender: Option<Gender>,
    pub domain: Option<Domain>,
    pub nationality: Option<String>,
    pub birthplace: Option<Birthplace>,
    pub party: Option<String>,
    pub frame: Option<String>,
}

#[derive(Deserialize)]
struct MetadataRow {
    target_id: String,
    #[serde(default)]
    age: String,
    #[serde(default)]
    gender: String,
    #[serde(default)]
    domain: String,
    #[serde(default)]
    nationality: String,
    #[serde(default)]
    birthplace: String,
    #[serde(default)]
    party: String,
    #[serde(default)]
    frame: String,
}

fn non_empty(s: String) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown level {s:?}"))
}

/// Parses a metadata CSV (`target_id,age,gender,domain,nationality,
/// birthplace,party,frame`); empty cells are missing values.
pub fn parse_metadata_csv<R: Read>(reader: R, origin: &str) -> Result<BTreeMap<String, Metadata>, RegressionError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = BTreeMap::new();
    for (i, row) in rdr.deserialize::<MetadataRow>().enumerate() {
        let line = i + 2;
        let bad = |message: String| RegressionError::Metadata {
            origin: origin.to_string(),
            line,
            message,
        };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let age = match non_empty(row.age) {
            Some(a) => Some(a.parse::<u32>().map_err(|_| bad(format!("age {a:?} is not a non-negative integer")))?),
            None => None,
        };
        let meta = Metadata {
            age,
            gender: non_empty(row.gender).map(|g| parse_enum(&g)).transpose().map_err(bad)?,
            domain: non_empty(row.domain).map(|d| d.parse()).transpose().map_err(bad)?,
            nationality: non_empty(row.nationality),
            birthplace: non_empty(row.birthplace).map(|b| parse_enum(&b)).transpose().map_err(bad)?,
            party: non_empty(row.party),
            frame: non_empty(row.frame),
        };
        if out.insert(row.target_id.clone(), meta).is_some() {
            return Err(bad(format!("duplicate target_id {}", row.target_id)));
        }
    }
    Ok(out)
}

pub fn read_metadata_csv(path: &Path) -> Result<BTreeMap<String, Metadata>, RegressionError> {
    let file = File::open(path).map_err(|e| RegressionError::Metadata {
        origin: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_metadata_csv(file, &path.display().to_string())
}

/// One row per delta, joined with compound, name and modifier scores and
/// metadata (targets without metadata keep missing values).
pub fn build_feature_rows(
    deltas: &[DeltaRecord],
    scores: &[ScoreRecord],
    metadata: &BTreeMap<String, Metadata>,
) -> Vec<FeatureRow> {
    use crate::valence::ScoreKind;
    let pick = |id: &str, kind: ScoreKind| {
        scores
            .iter()
            .find(|s| s.target_id == id && s.kind == kind)
            .map(|s| s.valence)
    };
    deltas
        .iter()
        .map(|d| {
            let meta = metadata.get(&d.target_id).cloned().unwrap_or_default();
            FeatureRow {
                target_id: d.target_id.clone(),
                delta: d.delta,
                name_valence: pick(&d.target_id, ScoreKind::FullName),
                pnc_valence: pick(&d.target_id, ScoreKind::Pnc),
                modifier_valence: pick(&d.target_id, ScoreKind::Modifier),
                age: meta.age,
                gender: meta.gender,
                domain: meta.domain,
                nationality: meta.nationality,
                birthplace: meta.birthplace,
                party: meta.party,
                frame: meta.frame,
            }
        })
        .collect()
}
