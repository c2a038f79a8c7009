use std::env;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use noma_uav::report::{compare_csv, summary_csv, timeseries_csv};
use noma_uav::{parse_scenario, print_scenario, run, PowerScheme, ScenarioConfig, Scheme};

mod output;

const SEED_ENV: &str = "NOMA_UAV_SEED";

#[derive(Parser)]
#[command(
    name = "noma-uav",
    version,
    about = "Uplink NOMA pairing simulator for cellular-connected UAVs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write timeseries.csv, summary.csv and scenario.txt.
    Run(RunArgs),
    /// Run every scheme on several seeds and write compare.csv.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed. NOMA_UAV_SEED takes precedence when set.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the scenario scheme: proposed, greedy or nongreedy.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Overrides the power solver of the proposed scheme: bisect, espa or fixed.
    #[arg(long)]
    power: Option<PowerScheme>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario file; its `scheme` key is ignored.
    #[arg(long)]
    scenario: PathBuf,
    /// Number of seeds, counted up from the scenario seed.
    #[arg(long)]
    seeds: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<noma_uav::Error> for Failure {
    fn from(e: noma_uav::Error) -> Self {
        match e {
            noma_uav::Error::Config { .. } | noma_uav::Error::Parse { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn seed_override(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    match env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Config(format!("{SEED_ENV}: invalid seed `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn write(dir: &Path, files: &[(&str, &str)]) -> Result<(), Failure> {
    output::write_all(dir, files)
        .map(|_| ())
        .map_err(|e| Failure::Runtime(format!("writing {}: {e}", dir.display())))
}

fn run_command(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = load(&args.scenario)?;
    if let Some(seed) = seed_override(args.seed)? {
        cfg.seed = seed;
    }
    if let Some(scheme) = args.scheme {
        cfg.scheme = scheme;
    }
    if let Some(power) = args.power {
        cfg.power_scheme = power;
    }
    let out = run(&cfg)?;
    let summary = summary_csv(std::slice::from_ref(&out.summary));
    write(
        &args.out,
        &[
            ("timeseries.csv", &timeseries_csv(&out.records)),
            ("summary.csv", &summary),
            ("scenario.txt", &print_scenario(&cfg)),
        ],
    )?;
    print!("{summary}");
    Ok(())
}

fn compare_command(args: CompareArgs) -> Result<(), Failure> {
    let base = load(&args.scenario)?;
    let first = seed_override(None)?.unwrap_or(base.seed);
    if args.seeds == 0 {
        return Err(Failure::Config("--seeds must be at least 1".into()));
    }
    let cells: Vec<ScenarioConfig> = (0..args.seeds)
        .flat_map(|i| {
            let base = &base;
            Scheme::ALL.iter().map(move |&scheme| ScenarioConfig {
                seed: first.wrapping_add(i),
                scheme,
                ..base.clone()
            })
        })
        .collect();
    let summaries = cells
        .par_iter()
        .map(|cfg| run(cfg).map(|o| o.summary))
        .collect::<Result<Vec<_>, _>>()?;
    let table = compare_csv(&summaries);
    write(
        &args.out,
        &[
            ("compare.csv", &table),
            ("scenario.txt", &print_scenario(&base)),
        ],
    )?;
    print!("{table}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run_command(args),
        Command::Compare(args) => compare_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
