// Univariate and multivariate OLS on synthetic target metadata.

use pnc_eval::regression::{
    multivariate_suite, standard_model_specs, univariate_scan, write_multivariate_csv, write_univariate_csv, Birthplace,
    FeatureRow, Gender, Predictor,
};
use pnc_eval::corpus::Domain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic_rows(n: usize) -> Vec<FeatureRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let parties = ["AfD", "CDU", "SPD", "no party"];
    let frames = ["Arriving", "Memory", "Speed_description"];
    (0..n)
        .map(|i| {
            let pnc: f64 = rng.gen_range(3.0..7.0);
            let name: f64 = rng.gen_range(4.0..6.0);
            let party = parties[rng.gen_range(0..parties.len())];
            let effect = if party == "AfD" { -0.6 } else { 0.0 };
            let mut r = FeatureRow::new(&format!("t{i:03}"), -4.35 + 0.9 * pnc + effect + rng.gen_range(-0.4..0.4));
            r.pnc_valence = Some(pnc);
            r.name_valence = Some(name);
            r.modifier_valence = Some(rng.gen_range(1.0..9.0));
            r.age = Some(rng.gen_range(25..85));
            r.gender = Some(if rng.gen_bool(0.5) { Gender::Female } else { Gender::Male });
            r.domain = Some(if party == "no party" { Domain::Sports } else { Domain::Politics });
            r.nationality = Some(if rng.gen_bool(0.8) { "Germany" } else { "Austria" }.into());
            r.birthplace = Some([Birthplace::WestGermany, Birthplace::EastGermany, Birthplace::OutsideGermany][rng.gen_range(0..3)]);
            r.party = Some(party.into());
            r.frame = Some(frames[rng.gen_range(0..frames.len())].into());
            r
        })
        .collect()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows = synthetic_rows(120);
    let stdout = std::io::stdout();

    let uni = univariate_scan(&rows, &Predictor::ALL)?;
    write_univariate_csv(stdout.lock(), &uni)?;
    println!();
    let multi = multivariate_suite(&rows, &standard_model_specs());
    write_multivariate_csv(stdout.lock(), &multi)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
