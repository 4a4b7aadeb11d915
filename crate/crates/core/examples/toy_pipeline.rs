// The full pipeline on the bundled toy data, written to a temp directory.

use std::path::Path;

use pnc_eval::pipeline::{run_all, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy/config.toml");
    let mut cfg = RunConfig::load(&config)?;
    cfg.out = std::env::temp_dir().join(format!("pnc-eval-toy-{}", std::process::id()));
    let out = cfg.out.clone();
    for report in run_all(cfg)? {
        println!("{:<9} {}", report.command.name(), report.outputs.join(", "));
    }
    let summary = std::fs::read_to_string(out.join("report/summary.json"))?;
    println!("{summary}");
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
