//! Seeded random search over (α, λ) with repeated k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::elastic_net::{elastic_net_fit, lambda_max, CvCandidate, ElasticNetFit};
use super::encode::DesignMatrix;
use super::RegressionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvMetric {
    #[default]
    Mse,
    Mae,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub n_candidates: usize,
    pub seed: u64,
    pub metric: CvMetric,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            repeats: 5,
            n_candidates: 25,
            seed: 0,
            metric: CvMetric::Mse,
        }
    }
}

/// Smallest λ sampled, relative to λ_max.
const LAMBDA_MIN_RATIO: f64 = 1e-4;

/// `assignments[r][i]` is the fold of row `i` in repeat `r`.
fn fold_assignments(n: usize, cfg: &CvConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    (0..cfg.repeats)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut fold = vec![0; n];
            for (pos, row) in order.into_iter().enumerate() {
                fold[row] = pos % cfg.folds;
            }
            fold
        })
        .collect()
}

fn evaluate(
    x: &DesignMatrix,
    y: &[f64],
    assignments: &[Vec<usize>],
    folds: usize,
    alpha: f64,
    lambda: f64,
) -> Result<(f64, f64), RegressionError> {
    let mut mse_sum = 0.0;
    let mut mae_sum = 0.0;
    let mut count = 0usize;
    for assign in assignments {
        for k in 0..folds {
            let train: Vec<usize> = (0..y.len()).filter(|i| assign[*i] != k).collect();
            let test: Vec<usize> = (0..y.len()).filter(|i| assign[*i] == k).collect();
            let xt = x.select_rows(&train);
            let yt: Vec<f64> = train.iter().map(|i| y[*i]).collect();
            let fit = elastic_net_fit(&xt, &yt, alpha, lambda)?;
            let pred = fit.predict(&x.select_rows(&test).data);
            let m = test.len() as f64;
            mse_sum += test.iter().zip(&pred).map(|(i, p)| (y[*i] - p).powi(2)).sum::<f64>() / m;
            mae_sum += test.iter().zip(&pred).map(|(i, p)| (y[*i] - p).abs()).sum::<f64>() / m;
            count += 1;
        }
    }
    Ok((mse_sum / count as f64, mae_sum / count as f64))
}

/// Samples candidates, scores them by repeated k-fold CV and refits the best
/// one on all rows. Identical inputs and seed give an identical result
/// regardless of thread count.
pub fn cv_random_search(x: &DesignMatrix, y: &[f64], cfg: &CvConfig) -> Result<ElasticNetFit, RegressionError> {
    let n = x.nrows();
    if cfg.folds < 2 || n < cfg.folds {
        return Err(RegressionError::TooFewRowsForFolds { n, folds: cfg.folds });
    }
    if y.len() != n {
        return Err(RegressionError::LengthMismatch { rows: n, response: y.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let candidates: Vec<(f64, f64)> = (0..cfg.n_candidates)
        .map(|_| {
            let alpha: f64 = rng.gen();
            let u: f64 = rng.gen();
            let lambda = lambda_max(&x.data, y, alpha) * LAMBDA_MIN_RATIO.powf(u);
            (alpha, lambda)
        })
        .collect();
    let assignments = fold_assignments(n, cfg, &mut rng);

    let table: Vec<CvCandidate> = candidates
        .par_iter()
        .enumerate()
        .map(|(index, &(alpha, lambda))| match evaluate(x, y, &assignments, cfg.folds, alpha, lambda) {
            Ok((mse, mae)) => CvCandidate {
                index,
                alpha,
                lambda,
                cv_error: Some(match cfg.metric {
                    CvMetric::Mse => mse,
                    CvMetric::Mae => mae,
                }),
                cv_mse: Some(mse),
                cv_mae: Some(mae),
                failure: None,
            },
            Err(e) => CvCandidate {
                index,
                alpha,
                lambda,
                cv_error: None,
                cv_mse: None,
                cv_mae: None,
                failure: Some(e.to_string()),
            },
        })
        .collect();

    let best = table
        .iter()
        .filter_map(|c| c.cv_error.map(|e| (e, c)))
        .fold(None::<(f64, &CvCandidate)>, |acc, (e, c)| match acc {
            Some((be, _)) if be <= e => acc,
            _ => Some((e, c)),
        })
        .map(|(_, c)| c.clone())
        .ok_or(RegressionError::NoViableCandidate)?;

    let mut fit = elastic_net_fit(x, y, best.alpha, best.lambda)?;
    let ybar = y.iter().sum::<f64>() / n as f64;
    let var = y.iter().map(|v| (v - ybar).powi(2)).sum::<f64>() / n as f64;
    fit.cv_r_squared = match (best.cv_mse, var > 0.0) {
        (Some(mse), true) => Some(1.0 - mse / var),
        _ => None,
    };
    fit.cv_table = table;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::super::encode::standardize;
    use super::*;
    use nalgebra::DMatrix;
    use std::collections::BTreeMap;

    fn data(n: usize) -> (DesignMatrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let raw = DMatrix::from_fn(n, 3, |_, _| rng.gen::<f64>());
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let (d, params) = standardize(&raw, &names).unwrap();
        let y = (0..n).map(|i| 2.0 * d[(i, 0)] + 0.1 * rng.gen::<f64>()).collect();
        (
            DesignMatrix {
                columns: names,
                data: d,
                reference_levels: BTreeMap::new(),
                standardization: Some(params),
            },
            y,
        )
    }

    #[test]
    fn deterministic_for_a_seed() {
        let (x, y) = data(40);
        let cfg = CvConfig { seed: 42, ..CvConfig::default() };
        let a = cv_random_search(&x, &y, &cfg).unwrap();
        let b = cv_random_search(&x, &y, &cfg).unwrap();
        assert_eq!(a.cv_table, b.cv_table);
        assert_eq!((a.alpha, a.lambda), (b.alpha, b.lambda));
        assert_eq!(a.cv_table.len(), 25);
        let other = cv_random_search(&x, &y, &CvConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.cv_table, other.cv_table);
    }

    #[test]
    fn candidates_lie_in_range_and_best_is_chosen() {
        let (x, y) = data(30);
        let fit = cv_random_search(&x, &y, &CvConfig::default()).unwrap();
        for c in &fit.cv_table {
            assert!((0.0..=1.0).contains(&c.alpha));
            let hi = lambda_max(&x.data, &y, c.alpha);
            assert!(c.lambda <= hi * (1.0 + 1e-12) && c.lambda >= hi * 1e-4 * (1.0 - 1e-12));
        }
        let min = fit.cv_table.iter().filter_map(|c| c.cv_error).fold(f64::INFINITY, f64::min);
        let chosen = fit.cv_table.iter().find(|c| c.alpha == fit.alpha && c.lambda == fit.lambda).unwrap();
        assert_eq!(chosen.cv_error, Some(min));
        assert!(fit.cv_r_squared.unwrap() > 0.9);
        assert!(fit.coefficient("a").unwrap() > 1.5);
    }

    #[test]
    fn mae_metric() {
        let (x, y) = data(30);
        let fit = cv_random_search(&x, &y, &CvConfig { metric: CvMetric::Mae, ..CvConfig::default() }).unwrap();
        assert!(fit.cv_table.iter().all(|c| c.cv_error == c.cv_mae));
    }

    #[test]
    fn fewer_rows_than_folds() {
        let (x, y) = data(4);
        assert!(matches!(
            cv_random_search(&x, &y, &CvConfig::default()),
            Err(RegressionError::TooFewRowsForFolds { n: 4, folds: 5 })
        ));
    }
}
