// Pearson and Spearman correlation between name and compound valence.

use pnc_eval::stats::{pearson, spearman};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let name = [4.99, 4.60, 5.12, 5.40, 4.75, 5.05, 4.88, 5.30];
    let pnc = [5.89, 4.42, 5.01, 5.10, 4.20, 5.05, 4.70, 5.60];
    for r in [pearson(&name, &pnc)?, spearman(&name, &pnc)?] {
        println!("{:<8} r = {:.3}  p = {:.4}  n = {}", r.method, r.coefficient, r.p_value.unwrap_or(f64::NAN), r.n);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
