// Orthographic search variants for a handful of compounds.

use pnc_eval::corpus::{generate_variants, Domain, TargetSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let targets = [
        ("guido", "Spaß-Guido", "Guido", "Westerwelle", Domain::Politics, vec![]),
        ("nahles", "Bätschi-Nahles", "Andrea", "Nahles", Domain::Politics, vec![]),
        ("schroeder", "Gazprom-Schröder", "Gerhard", "Schröder", Domain::Politics, vec!["Gasprom-Schröder".to_string()]),
        ("klose", "Tore-Klose", "Miroslav", "Klose", Domain::Sports, vec![]),
    ];
    for (id, surface, first, last, domain, alts) in targets {
        let target = TargetSpec::new(id, surface, None, None, first, last, domain, alts)?;
        let set = generate_variants(&target)?;
        println!("{surface}:");
        for v in &set.variants {
            println!("  {:<18} {}", v.heuristic.as_str(), v.text);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
