//! Elastic net by cyclic coordinate descent with soft-thresholding.

use nalgebra::DMatrix;
use serde::Serialize;

use super::encode::DesignMatrix;
use super::RegressionError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticNetOptions {
    /// Convergence threshold on the largest coefficient change in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for ElasticNetOptions {
    fn default() -> Self {
        ElasticNetOptions {
            tolerance: 1e-7,
            max_sweeps: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvCandidate {
    pub index: usize,
    pub alpha: f64,
    pub lambda: f64,
    /// Mean held-out error under the search metric; `None` if a fold failed.
    pub cv_error: Option<f64>,
    pub cv_mse: Option<f64>,
    pub cv_mae: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElasticNetFit {
    pub alpha: f64,
    pub lambda: f64,
    pub columns: Vec<String>,
    /// Coefficients on the standardized predictors.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// R² of the fitted model on its training data.
    pub r_squared: f64,
    /// 1 − MSE_cv / Var(y), filled in by the cross-validated search.
    pub cv_r_squared: Option<f64>,
    pub sweeps: usize,
    #[serde(skip_serializing)]
    pub objective_trace: Vec<f64>,
    pub cv_table: Vec<CvCandidate>,
}

impl ElasticNetFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.columns.iter().position(|c| c == name).map(|j| self.coefficients[j])
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        (0..x.nrows())
            .map(|i| self.intercept + (0..x.ncols()).map(|j| x[(i, j)] * self.coefficients[j]).sum::<f64>())
            .collect()
    }
}

pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn column_means(x: &DMatrix<f64>) -> Vec<f64> {
    let n = x.nrows() as f64;
    (0..x.ncols()).map(|j| x.column(j).sum() / n).collect()
}

/// Largest λ worth searching for mixing `alpha`: above it every slope is 0.
pub fn lambda_max(x: &DMatrix<f64>, y: &[f64], alpha: f64) -> f64 {
    let n = x.nrows() as f64;
    let means = column_means(x);
    let ybar = y.iter().sum::<f64>() / n;
    (0..x.ncols())
        .map(|j| {
            let dot: f64 = (0..x.nrows()).map(|i| (x[(i, j)] - means[j]) * (y[i] - ybar)).sum();
            dot.abs() / (n * alpha.max(1e-3))
        })
        .fold(0.0, f64::max)
}

fn objective(residual: &[f64], beta: &[f64], n: f64, alpha: f64, lambda: f64) -> f64 {
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let l2: f64 = beta.iter().map(|b| b * b).sum();
    let rss: f64 = residual.iter().map(|r| r * r).sum();
    rss / (2.0 * n) + lambda * (alpha * l1 + (1.0 - alpha) / 2.0 * l2)
}

/// Fits the elastic net on a standardized (intercept-free) design.
pub fn elastic_net_fit(
    x: &DesignMatrix,
    y: &[f64],
    alpha: f64,
    lambda: f64,
) -> Result<ElasticNetFit, RegressionError> {
    elastic_net_fit_with(x, y, alpha, lambda, ElasticNetOptions::default())
}

pub fn elastic_net_fit_with(
    x: &DesignMatrix,
    y: &[f64],
    alpha: f64,
    lambda: f64,
    options: ElasticNetOptions,
) -> Result<ElasticNetFit, RegressionError> {
    if x.has_intercept() {
        return Err(RegressionError::UnexpectedIntercept);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RegressionError::InvalidAlpha(alpha));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(RegressionError::InvalidLambda(lambda));
    }
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(RegressionError::LengthMismatch { rows: n, response: y.len() });
    }
    if n < 2 {
        return Err(RegressionError::TooFewRows { n });
    }
    let nf = n as f64;

    // Centering here keeps the intercept out of the penalty even when the
    // rows are a subset of a matrix standardized on the full data.
    let means = column_means(&x.data);
    let ybar = y.iter().sum::<f64>() / nf;
    // Column-major copy: column j is xc[j * n..(j + 1) * n].
    let mut xc = Vec::with_capacity(n * p);
    for j in 0..p {
        xc.extend(x.data.column(j).iter().map(|v| v - means[j]));
    }
    let mut residual: Vec<f64> = y.iter().map(|v| v - ybar).collect();
    let curvature: Vec<f64> = xc.chunks_exact(n).map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf).collect();

    let mut beta = vec![0.0; p];
    let mut trace = vec![objective(&residual, &beta, nf, alpha, lambda)];
    let mut sweeps = 0usize;
    let mut last_change = f64::INFINITY;
    let penalty_l1 = lambda * alpha;
    let penalty_l2 = lambda * (1.0 - alpha);

    while sweeps < options.max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for (j, col) in xc.chunks_exact(n).enumerate() {
            if curvature[j] == 0.0 {
                continue;
            }
            let dot: f64 = col.iter().zip(&residual).map(|(a, b)| a * b).sum();
            let rho = dot / nf + curvature[j] * beta[j];
            let updated = soft_threshold(rho, penalty_l1) / (curvature[j] + penalty_l2);
            let step = updated - beta[j];
            if step != 0.0 {
                for (r, v) in residual.iter_mut().zip(col) {
                    *r -= step * v;
                }
                beta[j] = updated;
                max_change = max_change.max(step.abs());
            }
        }
        let obj = objective(&residual, &beta, nf, alpha, lambda);
        let prev = *trace.last().expect("trace starts non-empty");
        // Each coordinate step is an exact minimization, so any rise beyond
        // rounding noise is a bug.
        if obj > prev + 1e-10 * prev.abs().max(1.0) {
            return Err(RegressionError::ObjectiveIncreased { sweep: sweeps, before: prev, after: obj });
        }
        trace.push(obj);
        last_change = max_change;
        if max_change < options.tolerance {
            let intercept = ybar - means.iter().zip(&beta).map(|(m, b)| m * b).sum::<f64>();
            let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
            let ssr: f64 = residual.iter().map(|r| r * r).sum();
            let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 0.0 };
            return Ok(ElasticNetFit {
                alpha,
                lambda,
                columns: x.columns.clone(),
                coefficients: beta,
                intercept,
                r_squared,
                cv_r_squared: None,
                sweeps,
                objective_trace: trace,
                cv_table: Vec::new(),
            });
        }
    }
    let tail = trace[trace.len().saturating_sub(10)..].to_vec();
    Err(RegressionError::NonConvergence {
        sweeps,
        max_change: last_change,
        objective_tail: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::super::encode::standardize;
    use super::super::ols::ols_fit;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn standardized(n: usize, p: usize, seed: u64) -> (DesignMatrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(n, p, |_, _| rng.gen::<f64>() * 4.0 - 2.0);
        let names: Vec<String> = (0..p).map(|j| format!("x{j}")).collect();
        let (data, params) = standardize(&raw, &names).unwrap();
        let y = (0..n)
            .map(|i| 1.5 + (0..p).map(|j| (j as f64 - 1.0) * data[(i, j)]).sum::<f64>() + rng.gen::<f64>() - 0.5)
            .collect();
        (
            DesignMatrix {
                columns: names,
                data,
                reference_levels: BTreeMap::new(),
                standardization: Some(params),
            },
            y,
        )
    }

    #[test]
    fn unpenalized_matches_ols() {
        let (x, y) = standardized(40, 3, 1);
        let en = elastic_net_fit(&x, &y, 0.5, 0.0).unwrap();
        let ols = ols_fit(&x.with_intercept(), &y).unwrap();
        for j in 0..3 {
            assert!((en.coefficients[j] - ols.coefficients[j + 1].estimate).abs() < 1e-4);
        }
        assert!((en.intercept - ols.intercept()).abs() < 1e-4);
        assert!((en.r_squared - ols.r_squared).abs() < 1e-6);
    }

    #[test]
    fn deadzone_zeroes_all_slopes() {
        let (x, y) = standardized(30, 4, 2);
        for alpha in [0.2, 0.7, 1.0] {
            // one ulp-scale margin: at exact equality rounding decides
            let lam = lambda_max(&x.data, &y, alpha) * (1.0 + 1e-12);
            let fit = elastic_net_fit(&x, &y, alpha, lam).unwrap();
            assert!(fit.coefficients.iter().all(|b| *b == 0.0));
            let below = elastic_net_fit(&x, &y, alpha, lam * 0.99).unwrap();
            assert!(below.coefficients.iter().any(|b| *b != 0.0));
            let ybar = y.iter().sum::<f64>() / y.len() as f64;
            assert!((fit.intercept - ybar).abs() < 1e-12);
        }
    }

    #[test]
    fn single_predictor_closed_form() {
        let (x, y) = standardized(25, 1, 3);
        let n = y.len() as f64;
        let ybar = y.iter().sum::<f64>() / n;
        let xy: f64 = (0..25).map(|i| x.data[(i, 0)] * (y[i] - ybar)).sum::<f64>() / n;
        for (alpha, lambda) in [(0.3, 0.1), (1.0, 0.05), (0.0, 2.0)] {
            let fit = elastic_net_fit(&x, &y, alpha, lambda).unwrap();
            let oracle = soft_threshold(xy, lambda * alpha) / (1.0 + lambda * (1.0 - alpha));
            assert!((fit.coefficients[0] - oracle).abs() < 1e-10, "{alpha} {lambda}");
        }
    }

    #[test]
    fn objective_trace_is_monotone() {
        let (x, y) = standardized(50, 5, 4);
        let fit = elastic_net_fit(&x, &y, 0.4, 0.01).unwrap();
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn shrinks_with_lambda() {
        let (x, y) = standardized(50, 3, 5);
        let mut prev = f64::INFINITY;
        for lambda in [0.0, 0.01, 0.1, 0.5, 1.0] {
            let fit = elastic_net_fit(&x, &y, 0.5, lambda).unwrap();
            let l1: f64 = fit.coefficients.iter().map(|b| b.abs()).sum();
            assert!(l1 <= prev + 1e-9);
            prev = l1;
        }
    }

    #[test]
    fn non_convergence_carries_trace() {
        let (x, y) = standardized(30, 3, 6);
        let opts = ElasticNetOptions { tolerance: 0.0, max_sweeps: 3 };
        match elastic_net_fit_with(&x, &y, 0.5, 0.0, opts) {
            Err(RegressionError::NonConvergence { sweeps, objective_tail, .. }) => {
                assert_eq!(sweeps, 3);
                assert_eq!(objective_tail.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (x, y) = standardized(10, 1, 7);
        assert!(matches!(elastic_net_fit(&x, &y, 1.5, 0.1), Err(RegressionError::InvalidAlpha(_))));
        assert!(matches!(elastic_net_fit(&x, &y, 0.5, -1.0), Err(RegressionError::InvalidLambda(_))));
        assert!(matches!(elastic_net_fit(&x.with_intercept(), &y, 0.5, 0.1), Err(RegressionError::UnexpectedIntercept)));
    }
}
