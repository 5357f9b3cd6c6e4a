use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use badapprox_cli::{
    run_exponent, run_lemma2, run_records, run_series, run_verify_theorem, CliError, ExperimentConfig, Outcome,
};

#[derive(Parser)]
#[command(name = "badapprox", version, about = "Diophantine approximation experiments for linear subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Record table of a subject, written to records.csv
    Records(Common),
    /// Exponent estimate of a subject
    Exponent(Common),
    /// Monte Carlo check of the exponent bound, written to samples.csv
    VerifyTheorem(Common),
    /// Covering profile and series classification, written to profile.csv
    Series(Common),
    /// Lattice points in shifted neighbourhoods, written to lemma2.csv
    Lemma2(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    subject: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-max")]
    t_max: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Thread count or "auto"
    #[arg(long)]
    parallelism: Option<String>,
    #[arg(long, value_parser = ["strict", "inclusive"])]
    convention: Option<String>,
    /// Any configuration key, as key=value; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("subject", self.subject.clone()),
            ("seed", self.seed.map(|s| s.to_string())),
            ("t_max", self.t_max.clone()),
            ("sample_count", self.samples.clone()),
            ("output_dir", self.out_dir.as_ref().map(|p| p.display().to_string())),
            ("parallelism", self.parallelism.clone()),
            ("convention", self.convention.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{kv}'")))?;
            cfg.set(k.trim(), v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&ExperimentConfig) -> Result<Outcome, CliError>) = match &cli.command {
        Command::Records(c) => (c, run_records),
        Command::Exponent(c) => (c, run_exponent),
        Command::VerifyTheorem(c) => (c, run_verify_theorem),
        Command::Series(c) => (c, run_series),
        Command::Lemma2(c) => (c, run_lemma2),
    };
    match common.config().and_then(|cfg| run(&cfg)) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
