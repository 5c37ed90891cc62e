use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use spikeloom::engine::NoiseConfig;
use spikeloom::stream::CodeScheme;
use spikeloom_cli::config::{ConfigFile, ModelKind, Overrides, RunConfig, ScenarioSource};
use spikeloom_cli::sweep::{noise_sweep, SweepConfig, DEFAULT_SEEDS, DEFAULT_SIGMAS};
use spikeloom_cli::{cmd_run, cmd_truthtable, Block};

#[derive(Parser, Debug)]
#[command(
    name = "spikeloom",
    version,
    about = "Spiking circuits with delays: logic blocks and activation-based memory"
)]
struct Cli {
    /// key = value file with defaults for any run option
    #[arg(long, global = true, env = "SPIKELOOM_CONFIG")]
    config: Option<PathBuf>,

    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a store/retrieve/erase scenario and check the answers
    Run(RunArgs),
    /// Simulate every combination of a selector or decoder
    Truthtable(TruthArgs),
    /// Repeat a scenario over noise levels and seeds
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Neuron model: sm or lif
    #[arg(long, env = "SPIKELOOM_MODEL")]
    model: Option<ModelKind>,
    /// Pacemaker phase count
    #[arg(long, env = "SPIKELOOM_PHASES")]
    phases: Option<usize>,
    /// Phase spacing in ms
    #[arg(long, env = "SPIKELOOM_DELTA_T")]
    delta_t: Option<u32>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario file, or `primes` for the built-in stream
    #[arg(long, env = "SPIKELOOM_SCENARIO")]
    scenario: Option<ScenarioSource>,
    /// Code scheme: binary or gray
    #[arg(long, env = "SPIKELOOM_CODE")]
    code: Option<CodeScheme>,
    #[command(flatten)]
    model: ModelArgs,
    /// Noise standard deviation as a fraction of theta
    #[arg(long, env = "SPIKELOOM_SIGMA")]
    sigma: Option<f64>,
    #[arg(long, env = "SPIKELOOM_SEED")]
    seed: Option<u64>,
    /// Raster CSV output
    #[arg(long, env = "SPIKELOOM_OUT_RASTER")]
    out_raster: Option<PathBuf>,
    /// Raster SVG output
    #[arg(long, env = "SPIKELOOM_OUT_SVG")]
    out_svg: Option<PathBuf>,
    /// Oracle report output
    #[arg(long, env = "SPIKELOOM_REPORT")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TruthArgs {
    /// selector or decoder
    block: Block,
    #[arg(long, default_value_t = 2)]
    omega: usize,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, env = "SPIKELOOM_SIGMA")]
    sigma: Option<f64>,
    #[arg(long, env = "SPIKELOOM_SEED")]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, env = "SPIKELOOM_SCENARIO")]
    scenario: Option<ScenarioSource>,
    #[arg(long, env = "SPIKELOOM_CODE")]
    code: Option<CodeScheme>,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated noise levels
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// Seeds per noise level
    #[arg(long, default_value_t = DEFAULT_SEEDS)]
    seeds: usize,
    /// First seed
    #[arg(long, env = "SPIKELOOM_SEED")]
    seed: Option<u64>,
}

fn resolve(config: Option<&PathBuf>, over: Overrides) -> Result<RunConfig> {
    let file = config
        .map(|p| ConfigFile::load(p))
        .transpose()
        .context("reading config file")?;
    Ok(RunConfig::resolve(over, file.as_ref())?)
}

fn model_overrides(m: ModelArgs) -> Overrides {
    Overrides {
        model: m.model,
        phases: m.phases,
        delta_t: m.delta_t,
        ..Overrides::default()
    }
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run(a) => {
            let over = Overrides {
                scenario: a.scenario,
                code: a.code,
                sigma: a.sigma,
                seed: a.seed,
                out_raster: a.out_raster,
                out_svg: a.out_svg,
                report: a.report,
                ..model_overrides(a.model)
            };
            let cfg = resolve(cli.config.as_ref(), over)?;
            let outcome = cmd_run(&cfg)?;
            print!("{}", outcome.report);
            Ok(ExitCode::from(outcome.exit_code() as u8))
        }
        Command::Truthtable(a) => {
            let over = Overrides {
                sigma: a.sigma,
                seed: a.seed,
                ..model_overrides(a.model)
            };
            let cfg = resolve(cli.config.as_ref(), over)?;
            let noise = NoiseConfig::new(cfg.sigma, cfg.seed)?;
            let report = cmd_truthtable(a.block, a.omega, cfg.model, cfg.delta_t, noise)?;
            println!("{report}");
            Ok(if report.all_match() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Sweep(a) => {
            let over = Overrides {
                scenario: a.scenario,
                code: a.code,
                seed: a.seed,
                ..model_overrides(a.model)
            };
            let cfg = resolve(cli.config.as_ref(), over)?;
            let (ops, file_scheme) = cfg.scenario.load()?;
            let sweep = SweepConfig {
                setup: cfg.setup(),
                ops,
                scheme: cfg.code.or(file_scheme).unwrap_or(CodeScheme::Binary),
                sigmas: a.sigmas.unwrap_or_else(|| DEFAULT_SIGMAS.to_vec()),
                seeds: a.seeds,
                base_seed: cfg.seed,
            };
            let report = noise_sweep(&sweep)?;
            println!("{report}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
