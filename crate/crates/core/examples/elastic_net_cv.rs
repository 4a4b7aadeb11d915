// Elastic-net selection with repeated k-fold random search.

use nalgebra::DMatrix;
use pnc_eval::regression::{cv_random_search, format_elastic_net_triple, standardize, CvConfig, DesignMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 80;
    let names: Vec<String> = ["pnc_valence", "name_valence", "age", "noise"].iter().map(|s| s.to_string()).collect();
    let raw = DMatrix::from_fn(n, names.len(), |_, _| rng.gen_range(-1.0..1.0));
    let y: Vec<f64> = (0..n).map(|i| 0.9 * raw[(i, 0)] - 0.3 * raw[(i, 1)] + rng.gen_range(-0.2..0.2)).collect();

    let (data, params) = standardize(&raw, &names)?;
    let x = DesignMatrix { columns: names, data, reference_levels: Default::default(), standardization: Some(params) };
    let fit = cv_random_search(&x, &y, &CvConfig { seed: 42, ..CvConfig::default() })?;

    println!("{}", format_elastic_net_triple(&fit));
    for (name, b) in fit.columns.iter().zip(&fit.coefficients) {
        println!("  {name:<12} {b:+.4}");
    }
    let best = fit.cv_table.iter().filter(|c| c.failure.is_none()).count();
    println!("{best} of {} candidates evaluated", fit.cv_table.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
