//! Tail probabilities used for correlation and regression significance.

use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

use super::StatsError;

/// Two-sided survival probability `P(|T| >= |t|)` of Student's t with `df`
/// degrees of freedom, computed through the regularized incomplete beta
/// function.
pub fn student_t_sf(t: f64, df: usize) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::InvalidDegreesOfFreedom(df));
    }
    if t.is_nan() {
        return Err(StatsError::NonFinite);
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let df = df as f64;
    let x = df / (df + t * t);
    Ok(beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// Upper tail `P(F >= f)` of the F distribution with `(d1, d2)` degrees of
/// freedom.
pub fn f_sf(f: f64, d1: usize, d2: usize) -> Result<f64, StatsError> {
    if d1 < 1 {
        return Err(StatsError::InvalidDegreesOfFreedom(d1));
    }
    if d2 < 1 {
        return Err(StatsError::InvalidDegreesOfFreedom(d2));
    }
    if f.is_nan() {
        return Err(StatsError::NonFinite);
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (d1 as f64, d2 as f64);
    let x = d2 / (d2 + d1 * f);
    Ok(beta_reg(d2 / 2.0, d1 / 2.0, x).clamp(0.0, 1.0))
}

/// Two-sided standard normal tail `P(|Z| >= |z|)`.
pub fn normal_two_sided_sf(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}
