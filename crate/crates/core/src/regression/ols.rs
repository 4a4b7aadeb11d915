//! Ordinary least squares via Householder QR.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::encode::DesignMatrix;
use super::RegressionError;
use crate::stats::{f_sf, student_t_sf};

/// Relative size below which a diagonal entry of R marks a column as linearly
/// dependent on the columns before it.
const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Residual standard error.
    pub residual_se: f64,
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub n: usize,
    /// Number of slope terms (columns excluding the intercept).
    pub p: usize,
    pub df_residual: usize,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0].estimate
    }
}

/// Significance stars for a p-value.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn two_sided_p(estimate: f64, se: f64, df: usize) -> (f64, f64) {
    if se > 0.0 {
        let t = estimate / se;
        let p = student_t_sf(t, df).unwrap_or(f64::NAN);
        (t, p)
    } else if estimate == 0.0 {
        (0.0, 1.0)
    } else {
        (f64::INFINITY.copysign(estimate), 0.0)
    }
}

/// Fits `y ~ X`; the design must carry an intercept column first.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit, RegressionError> {
    if !x.has_intercept() {
        return Err(RegressionError::MissingIntercept);
    }
    let n = x.nrows();
    let cols = x.ncols();
    if y.len() != n {
        return Err(RegressionError::LengthMismatch { rows: n, response: y.len() });
    }
    if n <= cols {
        return Err(RegressionError::NotEnoughRows { n, p: cols });
    }

    let qr = x.data.clone().qr();
    let r = qr.r();
    let q = qr.q();
    for j in 0..cols {
        let scale = x.data.column(j).norm().max(1.0);
        if r[(j, j)].abs() <= RANK_TOLERANCE * scale {
            return Err(rank_error(x, &r, j));
        }
    }

    let yv = DVector::from_column_slice(y);
    let qty = q.transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| rank_error(x, &r, cols - 1))?;
    let fitted = &x.data * &beta;
    let ssr: f64 = (&yv - &fitted).iter().map(|e| e * e).sum();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    if !(sst > 0.0) {
        return Err(RegressionError::ConstantResponse);
    }

    let k = cols - 1;
    let df = n - cols;
    let r2 = (1.0 - ssr / sst).clamp(0.0, 1.0);
    let adj = if k == 0 {
        0.0
    } else {
        1.0 - (1.0 - r2) * (n as f64 - 1.0) / df as f64
    };
    let sigma2 = ssr / df as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(cols, cols))
        .ok_or_else(|| rank_error(x, &r, cols - 1))?;
    let cov_unscaled = &r_inv * r_inv.transpose();

    let coefficients = (0..cols)
        .map(|j| {
            let se = (sigma2 * cov_unscaled[(j, j)]).max(0.0).sqrt();
            let (t_value, p_value) = two_sided_p(beta[j], se, df);
            Coefficient {
                name: x.columns[j].clone(),
                estimate: beta[j],
                std_error: se,
                t_value,
                p_value,
            }
        })
        .collect();

    let (f_statistic, f_p_value) = if k == 0 {
        (None, None)
    } else if ssr > 0.0 {
        let f = ((sst - ssr) / k as f64) / sigma2;
        (Some(f), f_sf(f, k, df).ok())
    } else {
        (Some(f64::INFINITY), Some(0.0))
    };

    Ok(OlsFit {
        coefficients,
        r_squared: r2,
        adj_r_squared: adj,
        residual_se: sigma2.sqrt(),
        f_statistic,
        f_p_value,
        n,
        p: k,
        df_residual: df,
    })
}

/// Names column `j` together with earlier columns it is a combination of.
fn rank_error(x: &DesignMatrix, r: &DMatrix<f64>, j: usize) -> RegressionError {
    let mut collinear_with = Vec::new();
    if j > 0 {
        let r11 = r.view((0, 0), (j, j)).into_owned();
        let r12 = r.view((0, j), (j, 1)).column(0).into_owned();
        if let Some(c) = r11.solve_upper_triangular(&r12) {
            let scale = c.amax().max(1e-300);
            for (i, v) in c.iter().enumerate() {
                if v.abs() > 1e-6 * scale {
                    collinear_with.push(x.columns[i].clone());
                }
            }
        }
    }
    RegressionError::RankDeficient {
        column: x.columns[j].clone(),
        collinear_with,
    }
}
