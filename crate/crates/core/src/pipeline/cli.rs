//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::{run_all, run_command, Command, CommandReport, CompareMode, Overrides, PipelineError, RunConfig, Unit};

#[derive(Debug, Parser)]
#[command(name = "pnc-eval", version, about = "Valence analysis of personal name compounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "pnc-eval.toml")]
    pub config: PathBuf,
    /// Minimum compound frequency for a target to be scored.
    #[arg(long, global = true)]
    pub min_freq: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Context unit: whole documents or single sentences.
    #[arg(long, global = true, value_enum)]
    pub unit: Option<UnitArg>,
    #[arg(long, global = true, value_enum)]
    pub compare_mode: Option<CompareModeArg>,
    /// Tolerance for the epsilon comparison mode.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UnitArg {
    Document,
    Sentence,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CompareModeArg {
    Sign,
    Epsilon,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CliCommand {
    /// Write the orthographic variants of every target.
    Variants,
    /// Find compound and full-name contexts and apply the frequency filter.
    Match,
    /// Score contexts against the valence lexicon and compute deltas.
    Score,
    /// Turn sentiment labels into valence scores and deltas per source.
    Sentiment,
    /// Compare label-based deltas with lexicon-based ones.
    Compare,
    /// Fit the univariate, multivariate and elastic-net models.
    Regress,
    /// Assemble plot data and report tables.
    Report,
    /// Run every stage in order.
    RunAll,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            min_freq: self.min_freq,
            seed: self.seed,
            unit: self.unit.map(|u| match u {
                UnitArg::Document => Unit::Document,
                UnitArg::Sentence => Unit::Sentence,
            }),
            compare_mode: self.compare_mode.map(|m| match m {
                CompareModeArg::Sign => CompareMode::Sign,
                CompareModeArg::Epsilon => CompareMode::Epsilon,
            }),
            epsilon: self.epsilon,
            out: self.out.clone(),
            threads: self.threads,
        }
    }
}

fn execute(cli: &Cli) -> Result<Vec<CommandReport>, PipelineError> {
    let mut cfg = RunConfig::load(&cli.flags.config)?;
    cfg.apply(&cli.flags.overrides());
    let single = match cli.command {
        CliCommand::Variants => Command::Variants,
        CliCommand::Match => Command::Match,
        CliCommand::Score => Command::Score,
        CliCommand::Sentiment => Command::Sentiment,
        CliCommand::Compare => Command::Compare,
        CliCommand::Regress => Command::Regress,
        CliCommand::Report => Command::Report,
        CliCommand::RunAll => return run_all(cfg),
    };
    Ok(vec![run_command(cfg, single)?])
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(reports) => {
            for r in reports {
                for note in &r.notes {
                    println!("{}: {note}", r.command.name());
                }
                println!("{}: wrote {}", r.command.name(), r.outputs.join(", "));
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.diagnostics());
            e.exit_code()
        }
    }
}
