use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use emgest_cli::{commands, CliError, Context, ExperimentConfig, ExitStatus, Options};

#[derive(Debug, Parser)]
#[command(name = "emgest", version, about = "Electromagnetic gesture recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit nonzero on ties and on maxima at the sampling-box boundary.
    #[arg(long, global = true)]
    strict: bool,
    /// Noise seed; overrides `noise.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "EMGEST_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve every (shape, direction) entry and write the dictionary.
    BuildDict,
    /// Simulate the configured gestures at both frequencies.
    Simulate,
    /// Run the location stage on measurement files.
    Locate {
        /// Measurement files; defaults to the simulate outputs.
        #[arg(long = "measurement")]
        measurements: Vec<PathBuf>,
    },
    /// Match measurements against a dictionary.
    Identify {
        #[arg(long = "measurement")]
        measurements: Vec<PathBuf>,
        #[arg(long)]
        dictionary: Option<PathBuf>,
        /// Match at this point (`x,y,z`) instead of locating first.
        #[arg(long, value_parser = parse_point)]
        position: Option<[f64; 3]>,
    },
    /// Full pipeline with a noise sweep.
    Experiment {
        #[arg(long)]
        dictionary: Option<PathBuf>,
        /// Also write the stage timing summary here.
        #[arg(long)]
        timing_file: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected three comma-separated numbers".to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.common.seed {
        config.noise.seed = seed;
    }
    if let Some(out) = &cli.common.out {
        config.output.dir = out.clone();
    }
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let mut options = Options {
        out: config.output.dir.clone(),
        strict: cli.common.strict,
        ..Options::default()
    };
    match &cli.command {
        Command::Locate { measurements } => options.measurements = measurements.clone(),
        Command::Identify {
            measurements,
            dictionary,
            position,
        } => {
            options.measurements = measurements.clone();
            options.dictionary = dictionary.clone();
            options.position = *position;
        }
        Command::Experiment {
            dictionary,
            timing_file,
        } => {
            options.dictionary = dictionary.clone();
            options.timing_file = timing_file.clone();
        }
        Command::BuildDict | Command::Simulate => {}
    }
    let ctx = Context::new(config, options)?;
    match cli.command {
        Command::BuildDict => commands::build_dict(&ctx),
        Command::Simulate => commands::simulate(&ctx),
        Command::Locate { .. } => commands::locate_cmd(&ctx),
        Command::Identify { .. } => commands::identify_cmd(&ctx),
        Command::Experiment { .. } => commands::experiment(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let status = e.status();
            debug_assert_ne!(status, ExitStatus::Success);
            ExitCode::from(status as u8)
        }
    }
}
