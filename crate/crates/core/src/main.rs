use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use cv_thermo::sweep::{
    dump_first_trial, run_estimation, run_sweep, validate_file, with_threads, EstimateSpec,
    SweepConfig, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "cv-thermo",
    version,
    about = "Gaussian-probe thermometry: Fisher information sweeps and Cramér–Rao studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a scenario's CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: one per logical core).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a maximum-likelihood MSE study and write a key=value report.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        trials: usize,
        /// Raw outcomes of the first trial (homodyne only).
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check a config and list every problem.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Flags named after config keys; a flag beats the file.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "T")]
    temperature: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    temperatures: Option<Vec<f64>>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long = "t_min")]
    t_min: Option<f64>,
    #[arg(long = "t_max")]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long, value_delimiter = ',')]
    quantities: Option<Vec<String>>,
    #[arg(long = "t_est")]
    t_est: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    measurement: Option<String>,
}

impl Overrides {
    fn to_config(&self) -> SweepConfig {
        SweepConfig {
            scenario: self.scenario.clone(),
            temperature: self.temperature,
            temperatures: self.temperatures.clone(),
            omega: self.omega,
            gamma: self.gamma,
            r: self.r,
            t_min: self.t_min,
            t_max: self.t_max,
            points: self.points,
            spacing: self.spacing.clone(),
            quantities: self.quantities.clone(),
            seed: self.seed,
            out: self.out.as_ref().map(|p| p.display().to_string()),
            t_est: self.t_est,
            l: self.l,
            measurement: self.measurement.clone(),
        }
    }
}

fn load(config: &Path, overrides: &Overrides) -> anyhow::Result<SweepConfig> {
    let file = SweepConfig::load(config).map_err(|e| anyhow!(e))?;
    Ok(file.merged(&overrides.to_config()))
}

fn problems(list: Vec<String>) -> anyhow::Error {
    anyhow!("invalid configuration:\n  {}", list.join("\n  "))
}

fn write_output(path: Option<&str>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {p}")),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// `CV_THERMO_SEED`, used only when neither flag nor config sets a seed.
fn env_seed() -> anyhow::Result<Option<u64>> {
    match std::env::var("CV_THERMO_SEED") {
        Ok(v) => {
            Ok(Some(v.trim().parse().with_context(|| {
                format!("CV_THERMO_SEED is not a u64: {v:?}")
            })?))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            config,
            threads,
            overrides,
        } => {
            let cfg = load(&config, &overrides)?;
            let spec = SweepSpec::resolve(&cfg).map_err(problems)?;
            let table = with_threads(threads, || run_sweep(&spec))??;
            write_output(spec.out.as_deref(), &table.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Estimate {
            config,
            m,
            trials,
            samples,
            threads,
            overrides,
        } => {
            let cfg = load(&config, &overrides)?;
            let seed = match cfg.seed {
                Some(s) => s,
                None => env_seed()?.ok_or_else(|| {
                    anyhow!("no seed: pass --seed, set seed in the config or set CV_THERMO_SEED")
                })?,
            };
            let spec = EstimateSpec::from_config(&cfg, m, trials, seed).map_err(problems)?;
            let outcome = with_threads(threads, || run_estimation(&spec))??;
            if let Some(path) = samples {
                let mut f = std::io::BufWriter::new(
                    std::fs::File::create(&path)
                        .with_context(|| format!("cannot write {}", path.display()))?,
                );
                dump_first_trial(&spec, &mut f)?;
                f.flush()?;
            }
            write_output(cfg.out.as_deref(), &outcome.render())?;
            Ok(if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Validate { config } => {
            let found = validate_file(&config).map_err(|e| anyhow!(e))?;
            if found.is_empty() {
                println!("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                for p in &found {
                    println!("{p}");
                }
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
